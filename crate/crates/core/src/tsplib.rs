//! TSPLIB instance parsing and edge weights.
//!
//! Only the symmetric metrics needed by the benchmark instances are
//! supported: `EUC_2D`, `CEIL_2D`, `ATT`, `GEO` and `EXPLICIT` weights in
//! `FULL_MATRIX` format. Anything else is rejected at parse time.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// Instances at or below this dimension get a precomputed distance matrix.
pub const DEFAULT_MATRIX_THRESHOLD: usize = 2000;

/// Registered optimal tour lengths of the benchmark instances.
const BUILTIN_OPTIMA: &[(&str, u64)] = &[
    ("pcb442", 50778),
    ("p654", 34643),
    ("d657", 48912),
    ("u724", 41910),
    ("rat783", 8806),
    ("dsj1000", 18659688),
    ("pr1002", 259045),
    ("vm1084", 239297),
    ("berlin52", 7542),
];

/// Returns the registered optimum for one of the built-in instances.
pub fn known_optimum(name: &str) -> Option<u64> {
    BUILTIN_OPTIMA
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, opt)| opt)
}

/// Built-in optima table with per-name overrides (e.g. from a config file).
#[derive(Debug, Clone, Default)]
pub struct OptimumRegistry {
    overrides: HashMap<String, u64>,
}

impl OptimumRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, optimum: u64) {
        self.overrides.insert(name.into(), optimum);
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.overrides
            .get(name)
            .copied()
            .or_else(|| known_optimum(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Euc2d,
    Ceil2d,
    Att,
    Geo,
    ExplicitFullMatrix,
}

impl Metric {
    /// The `EDGE_WEIGHT_TYPE` keyword value for this metric.
    pub fn keyword(self) -> &'static str {
        match self {
            Metric::Euc2d => "EUC_2D",
            Metric::Ceil2d => "CEIL_2D",
            Metric::Att => "ATT",
            Metric::Geo => "GEO",
            Metric::ExplicitFullMatrix => "EXPLICIT",
        }
    }

    fn is_coordinate_based(self) -> bool {
        !matches!(self, Metric::ExplicitFullMatrix)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TsplibError {
    Io(String),
    /// A header or data line could not be interpreted.
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    UnsupportedMetric {
        line: usize,
        value: String,
    },
    MissingField(&'static str),
    CountMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    InvalidMatrix(String),
    IndexOutOfRange {
        index: usize,
        dimension: usize,
    },
}

impl fmt::Display for TsplibError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(msg) => write!(f, "I/O error: {msg}"),
            Self::Parse {
                line,
                field,
                message,
            } => write!(f, "line {line}: invalid {field}: {message}"),
            Self::UnsupportedMetric { line, value } => {
                write!(f, "line {line}: unsupported EDGE_WEIGHT_TYPE `{value}`")
            }
            Self::MissingField(field) => write!(f, "missing required field {field}"),
            Self::CountMismatch {
                field,
                expected,
                found,
            } => write!(f, "{field}: expected {expected} entries, found {found}"),
            Self::InvalidMatrix(msg) => write!(f, "invalid edge weight matrix: {msg}"),
            Self::IndexOutOfRange { index, dimension } => {
                write!(
                    f,
                    "city index {index} out of range for dimension {dimension}"
                )
            }
        }
    }
}

impl std::error::Error for TsplibError {}

/// A parsed, immutable symmetric TSP instance.
#[derive(Debug, Clone)]
pub struct TspInstance {
    name: String,
    dimension: usize,
    metric: Metric,
    coords: Vec<(f64, f64)>,
    known_optimum: Option<u64>,
    /// Row-major `dimension x dimension` weights, when precomputed.
    matrix: Option<Vec<u32>>,
}

impl TspInstance {
    /// Builds a coordinate-based instance directly (no file involved).
    pub fn from_coords(
        name: impl Into<String>,
        metric: Metric,
        coords: Vec<(f64, f64)>,
    ) -> Result<Self, TsplibError> {
        if !metric.is_coordinate_based() {
            return Err(TsplibError::MissingField("EDGE_WEIGHT_SECTION"));
        }
        let name = name.into();
        let mut inst = TspInstance {
            known_optimum: known_optimum(&name),
            name,
            dimension: coords.len(),
            metric,
            coords,
            matrix: None,
        };
        inst.validate_dimension()?;
        inst.precompute_if_small(DEFAULT_MATRIX_THRESHOLD);
        Ok(inst)
    }

    /// Builds an explicit-matrix instance. The matrix must be square,
    /// symmetric and have a zero diagonal.
    pub fn from_matrix(name: impl Into<String>, rows: Vec<Vec<u32>>) -> Result<Self, TsplibError> {
        let dimension = rows.len();
        let mut flat = Vec::with_capacity(dimension * dimension);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dimension {
                return Err(TsplibError::InvalidMatrix(format!(
                    "row {r} has {} entries, expected {dimension}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat_matrix(name.into(), dimension, flat)
    }

    fn from_flat_matrix(
        name: String,
        dimension: usize,
        flat: Vec<u32>,
    ) -> Result<Self, TsplibError> {
        for a in 0..dimension {
            if flat[a * dimension + a] != 0 {
                return Err(TsplibError::InvalidMatrix(format!(
                    "non-zero diagonal at {a}"
                )));
            }
            for b in (a + 1)..dimension {
                if flat[a * dimension + b] != flat[b * dimension + a] {
                    return Err(TsplibError::InvalidMatrix(format!(
                        "asymmetric entry ({a}, {b})"
                    )));
                }
            }
        }
        let inst = TspInstance {
            known_optimum: known_optimum(&name),
            name,
            dimension,
            metric: Metric::ExplicitFullMatrix,
            coords: Vec::new(),
            matrix: Some(flat),
        };
        inst.validate_dimension()?;
        Ok(inst)
    }

    fn validate_dimension(&self) -> Result<(), TsplibError> {
        if self.dimension < 3 {
            return Err(TsplibError::Parse {
                line: 0,
                field: "DIMENSION".into(),
                message: format!("need at least 3 cities, got {}", self.dimension),
            });
        }
        Ok(())
    }

    /// Parses TSPLIB text. Optima are looked up in the built-in table.
    pub fn parse(text: &str) -> Result<Self, TsplibError> {
        Self::parse_with(text, &OptimumRegistry::default(), DEFAULT_MATRIX_THRESHOLD)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, TsplibError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TsplibError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    /// Parses TSPLIB text with an explicit optimum registry and matrix threshold.
    pub fn parse_with(
        text: &str,
        registry: &OptimumRegistry,
        matrix_threshold: usize,
    ) -> Result<Self, TsplibError> {
        let header = parse_text(text)?;
        let mut inst = match header.metric {
            Metric::ExplicitFullMatrix => {
                let n = header.dimension;
                if header.weights.len() != n * n {
                    return Err(TsplibError::CountMismatch {
                        field: "EDGE_WEIGHT_SECTION",
                        expected: n * n,
                        found: header.weights.len(),
                    });
                }
                Self::from_flat_matrix(header.name, n, header.weights)?
            }
            metric => {
                if header.coords.len() != header.dimension {
                    return Err(TsplibError::CountMismatch {
                        field: "NODE_COORD_SECTION",
                        expected: header.dimension,
                        found: header.coords.len(),
                    });
                }
                let inst = TspInstance {
                    name: header.name,
                    dimension: header.dimension,
                    metric,
                    coords: header.coords,
                    known_optimum: None,
                    matrix: None,
                };
                inst.validate_dimension()?;
                inst
            }
        };
        inst.known_optimum = registry.get(&inst.name);
        inst.precompute_if_small(matrix_threshold);
        Ok(inst)
    }

    fn precompute_if_small(&mut self, threshold: usize) {
        if self.matrix.is_some() || self.dimension > threshold {
            return;
        }
        let n = self.dimension;
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let w = self.compute_weight(a, b);
                flat[a * n + b] = w;
                flat[b * n + a] = w;
            }
        }
        self.matrix = Some(flat);
    }

    /// Drops the precomputed matrix so weights are computed on demand.
    /// Explicit instances keep theirs (it is the only source of weights).
    pub fn without_matrix(mut self) -> Self {
        if self.metric.is_coordinate_based() {
            self.matrix = None;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn known_optimum(&self) -> Option<u64> {
        self.known_optimum
    }

    pub fn set_known_optimum(&mut self, optimum: Option<u64>) {
        self.known_optimum = optimum;
    }

    pub fn has_matrix(&self) -> bool {
        self.matrix.is_some()
    }

    /// Checked edge weight between cities `a` and `b` (0-based).
    pub fn edge_weight(&self, a: usize, b: usize) -> Result<u32, TsplibError> {
        for index in [a, b] {
            if index >= self.dimension {
                return Err(TsplibError::IndexOutOfRange {
                    index,
                    dimension: self.dimension,
                });
            }
        }
        Ok(self.dist(a, b))
    }

    /// Unchecked edge weight; panics on out-of-range indices.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> u32 {
        match &self.matrix {
            Some(m) => m[a * self.dimension + b],
            None => self.compute_weight(a, b),
        }
    }

    fn compute_weight(&self, a: usize, b: usize) -> u32 {
        if a == b {
            return 0;
        }
        let (xa, ya) = self.coords[a];
        let (xb, yb) = self.coords[b];
        match self.metric {
            Metric::Euc2d => nint(euclid(xa - xb, ya - yb)),
            Metric::Ceil2d => euclid(xa - xb, ya - yb).ceil() as u32,
            Metric::Att => att_weight(xa - xb, ya - yb),
            Metric::Geo => geo_weight((xa, ya), (xb, yb)),
            Metric::ExplicitFullMatrix => unreachable!("explicit instances always carry a matrix"),
        }
    }

    /// Header fields rendered in TSPLIB syntax.
    pub fn header(&self) -> String {
        let mut out = format!(
            "NAME : {}\nTYPE : TSP\nDIMENSION : {}\nEDGE_WEIGHT_TYPE : {}\n",
            self.name, self.dimension, self.metric
        );
        if self.metric == Metric::ExplicitFullMatrix {
            out.push_str("EDGE_WEIGHT_FORMAT : FULL_MATRIX\n");
        }
        out
    }

    /// Serializes the whole instance as a TSPLIB file.
    pub fn to_tsplib(&self) -> String {
        let mut out = self.header();
        if self.metric.is_coordinate_based() {
            out.push_str("NODE_COORD_SECTION\n");
            for (i, (x, y)) in self.coords.iter().enumerate() {
                out.push_str(&format!("{} {} {}\n", i + 1, x, y));
            }
        } else {
            out.push_str("EDGE_WEIGHT_SECTION\n");
            for a in 0..self.dimension {
                let row: Vec<String> = (0..self.dimension)
                    .map(|b| self.dist(a, b).to_string())
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out.push_str("EOF\n");
        out
    }
}

/// TSPLIB `nint`: floor(x + 0.5).
#[inline]
fn nint(x: f64) -> u32 {
    (x + 0.5).floor() as u32
}

#[inline]
fn euclid(dx: f64, dy: f64) -> f64 {
    (dx * dx + dy * dy).sqrt()
}

fn att_weight(dx: f64, dy: f64) -> u32 {
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if (t as f64) < r {
        t + 1
    } else {
        t
    }
}

#[allow(clippy::approx_constant)]
const GEO_PI: f64 = 3.141592;
const EARTH_RADIUS: f64 = 6378.388;

/// Converts a TSPLIB `DDD.MM` coordinate to radians.
fn geo_radians(v: f64) -> f64 {
    let deg = v.trunc();
    let min = v - deg;
    GEO_PI * (deg + 5.0 * min / 3.0) / 180.0
}

fn geo_weight(a: (f64, f64), b: (f64, f64)) -> u32 {
    let (lat_a, lon_a) = (geo_radians(a.0), geo_radians(a.1));
    let (lat_b, lon_b) = (geo_radians(b.0), geo_radians(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    (EARTH_RADIUS * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0) as u32
}

struct RawInstance {
    name: String,
    dimension: usize,
    metric: Metric,
    coords: Vec<(f64, f64)>,
    weights: Vec<u32>,
}

#[derive(PartialEq)]
enum Section {
    Header,
    Coords,
    Weights,
    Skip,
}

fn parse_text(text: &str) -> Result<RawInstance, TsplibError> {
    let mut name = None;
    let mut dimension = None;
    let mut metric = None;
    let mut format = None;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut section = Section::Header;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        match line {
            "NODE_COORD_SECTION" => {
                section = Section::Coords;
                continue;
            }
            "EDGE_WEIGHT_SECTION" => {
                section = Section::Weights;
                continue;
            }
            "DISPLAY_DATA_SECTION" | "TOUR_SECTION" | "FIXED_EDGES_SECTION" => {
                section = Section::Skip;
                continue;
            }
            _ => {}
        }

        if let Some((key, value)) = line.split_once(':') {
            // Header keywords may follow a data section (rare, but legal).
            let key = key.trim();
            if key.chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                section = Section::Header;
                let value = value.trim();
                match key {
                    "NAME" => name = Some(value.to_string()),
                    "DIMENSION" => {
                        let n = value.parse::<usize>().map_err(|e| TsplibError::Parse {
                            line: lineno,
                            field: "DIMENSION".into(),
                            message: format!("`{value}`: {e}"),
                        })?;
                        dimension = Some(n);
                    }
                    "TYPE" => {
                        if value != "TSP" {
                            return Err(TsplibError::Parse {
                                line: lineno,
                                field: "TYPE".into(),
                                message: format!("only symmetric TSP is supported, got `{value}`"),
                            });
                        }
                    }
                    "EDGE_WEIGHT_TYPE" => {
                        metric = Some(match value {
                            "EUC_2D" => Metric::Euc2d,
                            "CEIL_2D" => Metric::Ceil2d,
                            "ATT" => Metric::Att,
                            "GEO" => Metric::Geo,
                            "EXPLICIT" => Metric::ExplicitFullMatrix,
                            _ => {
                                return Err(TsplibError::UnsupportedMetric {
                                    line: lineno,
                                    value: value.to_string(),
                                })
                            }
                        });
                    }
                    "EDGE_WEIGHT_FORMAT" => {
                        if value != "FULL_MATRIX" {
                            return Err(TsplibError::Parse {
                                line: lineno,
                                field: "EDGE_WEIGHT_FORMAT".into(),
                                message: format!("only FULL_MATRIX is supported, got `{value}`"),
                            });
                        }
                        format = Some(value.to_string());
                    }
                    _ => {}
                }
                continue;
            }
        }

        match section {
            Section::Coords => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(TsplibError::Parse {
                        line: lineno,
                        field: "NODE_COORD_SECTION".into(),
                        message: format!("expected `index x y`, got `{line}`"),
                    });
                }
                let index = parts[0].parse::<usize>().map_err(|e| TsplibError::Parse {
                    line: lineno,
                    field: "node index".into(),
                    message: format!("`{}`: {e}", parts[0]),
                })?;
                if index != coords.len() + 1 {
                    return Err(TsplibError::Parse {
                        line: lineno,
                        field: "node index".into(),
                        message: format!("expected node {}, got {index}", coords.len() + 1),
                    });
                }
                let coord = |s: &str, field: &str| {
                    s.parse::<f64>().map_err(|e| TsplibError::Parse {
                        line: lineno,
                        field: field.into(),
                        message: format!("`{s}`: {e}"),
                    })
                };
                coords.push((
                    coord(parts[1], "x coordinate")?,
                    coord(parts[2], "y coordinate")?,
                ));
            }
            Section::Weights => {
                for tok in line.split_whitespace() {
                    let w = tok.parse::<u32>().map_err(|e| TsplibError::Parse {
                        line: lineno,
                        field: "EDGE_WEIGHT_SECTION".into(),
                        message: format!("`{tok}`: {e}"),
                    })?;
                    weights.push(w);
                }
            }
            Section::Skip => {}
            Section::Header => {
                return Err(TsplibError::Parse {
                    line: lineno,
                    field: "header".into(),
                    message: format!("expected `KEY : value`, got `{line}`"),
                })
            }
        }
    }

    let metric = metric.ok_or(TsplibError::MissingField("EDGE_WEIGHT_TYPE"))?;
    if metric == Metric::ExplicitFullMatrix && format.is_none() {
        return Err(TsplibError::MissingField("EDGE_WEIGHT_FORMAT"));
    }
    Ok(RawInstance {
        name: name.ok_or(TsplibError::MissingField("NAME"))?,
        dimension: dimension.ok_or(TsplibError::MissingField("DIMENSION"))?,
        metric,
        coords,
        weights,
    })
}
