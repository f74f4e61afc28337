//! Input functions: polynomial restrictions to the sphere and per-vertex tables.
//!
//! A polynomial `sum c * x^i y^j z^k` of degree `D` restricted to the sphere
//! is Lipschitz with constant at most `D * sqrt(3) * (sum c^2)^(1/2)`; vertex
//! tables carry no analytic structure and must supply their own bound.

use std::collections::BTreeMap;

use crate::sphere::{self, UnitPoint};
use crate::{Error, Result};

/// One monomial term `c * x^i * y^j * z^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub c: f64,
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

/// A real polynomial in the ambient coordinates, kept in canonical term order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Merges duplicate `(i, j, k)` exponents, drops zero coefficients, sorts.
    pub fn new(raw: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut merged: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
        for t in raw {
            if !t.c.is_finite() {
                return Err(Error::Parse(format!(
                    "non-finite coefficient {} on x^{} y^{} z^{}",
                    t.c, t.i, t.j, t.k
                )));
            }
            *merged.entry((t.i, t.j, t.k)).or_insert(0.0) += t.c;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((i, j, k), c)| Monomial { c, i, j, k })
            .collect();
        Ok(Polynomial { terms })
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.i + t.j + t.k).max().unwrap_or(0)
    }

    pub fn evaluate(&self, p: &UnitPoint) -> f64 {
        let (x, y, z) = (p.x(), p.y(), p.z());
        self.terms
            .iter()
            .map(|t| t.c * x.powi(t.i as i32) * y.powi(t.j as i32) * z.powi(t.k as i32))
            .sum()
    }

    /// Lipschitz bound `D * sqrt(3) * (sum c^2)^(1/2)` for the restriction to the sphere.
    pub fn lip_bound(&self) -> f64 {
        let d = self.degree() as f64;
        let sq: f64 = self.terms.iter().map(|t| t.c * t.c).sum();
        d * 3.0_f64.sqrt() * sq.sqrt()
    }

    /// The polynomial `p -> self(R p)`, obtained by substituting the rotated
    /// coordinates and re-expanding.
    pub fn rotate(&self, r: &sphere::Rotation) -> Polynomial {
        let mut acc: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
        for t in &self.terms {
            let mut part: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
            part.insert((0, 0, 0), t.c);
            for (axis, reps) in [(0usize, t.i), (1, t.j), (2, t.k)] {
                for _ in 0..reps {
                    part = mul_linear(&part, r[axis]);
                }
            }
            for (key, c) in part {
                *acc.entry(key).or_insert(0.0) += c;
            }
        }
        Polynomial {
            terms: acc
                .into_iter()
                .filter(|&(_, c)| c != 0.0)
                .map(|((i, j, k), c)| Monomial { c, i, j, k })
                .collect(),
        }
    }
}

fn mul_linear(
    poly: &BTreeMap<(u32, u32, u32), f64>,
    lin: [f64; 3],
) -> BTreeMap<(u32, u32, u32), f64> {
    let mut out = BTreeMap::new();
    for (&(i, j, k), &c) in poly {
        for (axis, &l) in lin.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let key = match axis {
                0 => (i + 1, j, k),
                1 => (i, j + 1, k),
                _ => (i, j, k + 1),
            };
            *out.entry(key).or_insert(0.0) += c * l;
        }
    }
    out
}

/// Random dense polynomial of total degree `max_degree` with coefficients
/// in [-1, 1]; used by the verification harnesses.
pub fn random_polynomial<R: rand::Rng>(rng: &mut R, max_degree: u32) -> Polynomial {
    let mut terms = Vec::new();
    for i in 0..=max_degree {
        for j in 0..=max_degree - i {
            for k in 0..=max_degree - i - j {
                terms.push(Monomial {
                    c: rng.gen_range(-1.0..1.0),
                    i,
                    j,
                    k,
                });
            }
        }
    }
    Polynomial::new(terms).expect("finite coefficients")
}

/// Per-vertex sample table for a triangulation of depth `n`.
#[derive(Clone, Debug)]
pub struct VertexTable {
    pub n: u32,
    pub values: Vec<f64>,
    pub lip_bound: Option<f64>,
}

/// An input function the pipeline can sample.
#[derive(Clone, Debug)]
pub enum InputFunction {
    Polynomial(Polynomial),
    VertexTable(VertexTable),
}

impl InputFunction {
    /// Named presets; each resolves to a polynomial.
    pub fn builtin(name: &str) -> Result<Self> {
        let poly = match name {
            "z" => Polynomial::new([Monomial { c: 1.0, i: 0, j: 0, k: 1 }])?,
            "one" => Polynomial::new([Monomial { c: 1.0, i: 0, j: 0, k: 0 }])?,
            // (z - 0.3)^2 expanded.
            "z-shift-sq" => Polynomial::new([
                Monomial { c: 1.0, i: 0, j: 0, k: 2 },
                Monomial { c: -0.6, i: 0, j: 0, k: 1 },
                Monomial { c: 0.09, i: 0, j: 0, k: 0 },
            ])?,
            other => {
                return Err(Error::Parse(format!(
                    "unknown builtin function {other:?} (available: z, one, z-shift-sq)"
                )))
            }
        };
        Ok(InputFunction::Polynomial(poly))
    }

    /// Parses a function file: a JSON array of monomials or a vertex-table object.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::Parse(format!("function file is not valid JSON: {e}")))?;
        match value {
            serde_json::Value::Array(_) => {
                #[derive(serde::Deserialize)]
                struct TermJson {
                    c: f64,
                    i: u32,
                    j: u32,
                    k: u32,
                }
                let terms: Vec<TermJson> = serde_json::from_value(value).map_err(|e| {
                    Error::Parse(format!(
                        "polynomial terms must be objects with fields c, i, j, k: {e}"
                    ))
                })?;
                let poly = Polynomial::new(
                    terms
                        .into_iter()
                        .map(|t| Monomial { c: t.c, i: t.i, j: t.j, k: t.k }),
                )?;
                Ok(InputFunction::Polynomial(poly))
            }
            serde_json::Value::Object(_) => {
                #[derive(serde::Deserialize)]
                struct TableJson {
                    #[serde(rename = "N")]
                    n: u32,
                    values: Vec<f64>,
                    #[serde(default)]
                    lip_bound: Option<f64>,
                }
                let t: TableJson = serde_json::from_value(value).map_err(|e| {
                    Error::Parse(format!("vertex table must have fields N and values: {e}"))
                })?;
                let table = VertexTable {
                    n: t.n,
                    values: t.values,
                    lip_bound: t.lip_bound,
                };
                validate_table(&table)?;
                Ok(InputFunction::VertexTable(table))
            }
            _ => Err(Error::Parse(
                "function file must be a JSON array (polynomial) or object (vertex table)".into(),
            )),
        }
    }

    /// Evaluates at an arbitrary sphere point; vertex tables are only defined
    /// at triangulation vertices and are rejected here.
    pub fn evaluate(&self, p: &UnitPoint) -> Result<f64> {
        match self {
            InputFunction::Polynomial(poly) => Ok(poly.evaluate(p)),
            InputFunction::VertexTable(_) => Err(Error::Parameter(
                "vertex-table functions are defined only at triangulation vertices".into(),
            )),
        }
    }

    /// Evaluates at triangulation vertex `index` located at `p`.
    pub fn evaluate_at_vertex(&self, index: usize, p: &UnitPoint) -> Result<f64> {
        match self {
            InputFunction::Polynomial(poly) => Ok(poly.evaluate(p)),
            InputFunction::VertexTable(t) => t.values.get(index).copied().ok_or_else(|| {
                Error::Parameter(format!(
                    "vertex index {index} out of range for table of length {}",
                    t.values.len()
                ))
            }),
        }
    }

    /// Lipschitz bound used by the certified error estimate.
    pub fn lip_bound(&self) -> Result<f64> {
        match self {
            InputFunction::Polynomial(poly) => Ok(poly.lip_bound()),
            InputFunction::VertexTable(t) => t.lip_bound.ok_or_else(|| {
                Error::Parameter(
                    "vertex-table input needs an explicit lip_bound for error estimates".into(),
                )
            }),
        }
    }

    /// Depth the function is pinned to, for vertex tables.
    pub fn table_depth(&self) -> Option<u32> {
        match self {
            InputFunction::Polynomial(_) => None,
            InputFunction::VertexTable(t) => Some(t.n),
        }
    }
}

fn validate_table(t: &VertexTable) -> Result<()> {
    if t.n < 1 {
        return Err(Error::Parameter("vertex table has N < 1".into()));
    }
    let expect = 10 * (t.n as usize) * (t.n as usize) + 2;
    if t.values.len() != expect {
        return Err(Error::Parse(format!(
            "vertex table for N = {} must have {} values, got {}",
            t.n,
            expect,
            t.values.len()
        )));
    }
    if let Some(v) = t.values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("vertex table contains non-finite value {v}")));
    }
    if let Some(lb) = t.lip_bound {
        if !lb.is_finite() || lb < 0.0 {
            return Err(Error::Parameter(format!("lip_bound {lb} must be finite and >= 0")));
        }
    }
    Ok(())
}
