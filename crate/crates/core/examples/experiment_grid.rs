// A small repeated-run grid with Welch comparisons, written to a
// temporary directory as CSV and Markdown.

use divmig::harness::{self, ExperimentConfig};

pub fn run() {
    let out = std::env::temp_dir().join("divmig-experiment-grid");
    let text = format!(
        "instance = {}/data/berlin52.tsp\n\
         modes = classic, gated\n\
         alphas = 0.5, 2.0\n\
         betas = 1.0\n\
         intervals = 25, 50\n\
         repetitions = 5\n\
         islands = 4\n\
         subpop = 16\n\
         rounds = 10\n\
         seed = 3\n\
         out_dir = {}\n",
        env!("CARGO_MANIFEST_DIR"),
        out.display()
    );
    let cfg = ExperimentConfig::parse(&text).expect("valid config");
    let outcome = harness::experiment(&cfg).expect("experiment");
    print!("{}", harness::render_markdown(&outcome.reports));
    println!("\n{} runs; files in {}", outcome.raw.len(), out.display());
}

fn main() {
    run();
}
