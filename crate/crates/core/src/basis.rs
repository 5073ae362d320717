//! Contracted Cartesian Gaussian basis sets.
//!
//! A basis library is parsed from a declarative text file in the common
//! exchange-format layout (element + shell letter, then exponent/coefficient
//! rows) and instantiated over a [`Geometry`](crate::geometry::Geometry) by
//! placing its per-element shells on each matching atom.
//!
//! Normalization convention: each primitive is normalized, and every
//! contracted Cartesian component is additionally scaled to unit
//! self-overlap, so the overlap matrix always has a unit diagonal.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::Geometry;

/// Highest supported angular momentum (s, p, d).
pub const L_MAX: usize = 2;

/// Cartesian component exponents (i, j, k) per angular momentum, in the
/// fixed canonical order used everywhere in this crate:
/// p: x, y, z; d: xx, xy, xz, yy, yz, zz.
pub fn cart_components(l: usize) -> &'static [[usize; 3]] {
    const S: [[usize; 3]; 1] = [[0, 0, 0]];
    const P: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    const D: [[usize; 3]; 6] = [
        [2, 0, 0],
        [1, 1, 0],
        [1, 0, 1],
        [0, 2, 0],
        [0, 1, 1],
        [0, 0, 2],
    ];
    match l {
        0 => &S,
        1 => &P,
        2 => &D,
        _ => panic!("angular momentum {l} not supported (max {L_MAX})"),
    }
}

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("basis parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no basis functions defined for element Z = {z}")]
    MissingElement { z: u32 },
    #[error("shell {shell} references atom {atom} but the geometry has {n_atoms} atoms")]
    BadAtomIndex {
        shell: usize,
        atom: usize,
        n_atoms: usize,
    },
    #[error("non-positive exponent {value} in basis")]
    BadExponent { value: f64 },
}

/// One primitive Gaussian: exponent and (raw) contraction coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub exponent: f64,
    pub coefficient: f64,
}

/// A contracted shell placed on an atom of a concrete geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub atom: usize,
    pub l: usize,
    pub primitives: Vec<Primitive>,
}

/// A single Cartesian basis function with fully normalized primitive
/// coefficients; the flat list of these is what the integral code consumes.
#[derive(Debug, Clone)]
pub struct CartFunction {
    pub atom: usize,
    pub lmn: [usize; 3],
    /// (exponent, coefficient) with primitive and contracted normalization
    /// folded in.
    pub prims: Vec<(f64, f64)>,
}

/// Per-element shell templates parsed from a basis file.
#[derive(Debug, Clone)]
pub struct BasisLibrary {
    pub name: String,
    elements: BTreeMap<u32, Vec<(usize, Vec<Primitive>)>>,
    checksum: String,
}

impl BasisLibrary {
    /// Parse the basis text format. Example:
    ///
    /// ```text
    /// H S
    ///   3.42525091  0.15432897
    ///   0.62391373  0.53532814
    ///   0.16885540  0.44463454
    /// O SP
    ///   5.0331513  -0.09996723  0.15591627
    ///   1.1695961   0.39951283  0.60768372
    ///   0.3803890   0.70115470  0.39195739
    /// ```
    ///
    /// Shell letters: S, P, D and the fused SP (one exponent column, one S
    /// and one P coefficient column).
    pub fn parse(name: &str, text: &str) -> Result<Self, BasisError> {
        let mut elements: BTreeMap<u32, Vec<(usize, Vec<Primitive>)>> = BTreeMap::new();
        let mut current: Option<(u32, Vec<usize>, Vec<Vec<Primitive>>)> = None;

        let mut flush =
            |cur: &mut Option<(u32, Vec<usize>, Vec<Vec<Primitive>>)>| -> Result<(), BasisError> {
                if let Some((z, ls, prim_sets)) = cur.take() {
                    for (l, prims) in ls.into_iter().zip(prim_sets) {
                        if prims.is_empty() {
                            return Err(BasisError::Parse {
                                line: 0,
                                msg: format!("shell with no primitives for Z = {z}"),
                            });
                        }
                        elements.entry(z).or_default().push((l, prims));
                    }
                }
                Ok(())
            };

        for (ln0, raw) in text.lines().enumerate() {
            let ln = ln0 + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("!") {
                continue;
            }
            let first = line.chars().next().unwrap();
            if first.is_ascii_alphabetic() {
                flush(&mut current)?;
                let mut it = line.split_whitespace();
                let sym = it.next().unwrap();
                let z = Geometry::z_of_symbol(sym).ok_or_else(|| BasisError::Parse {
                    line: ln,
                    msg: format!("unknown element '{sym}'"),
                })?;
                let letter = it.next().ok_or_else(|| BasisError::Parse {
                    line: ln,
                    msg: "expected shell letter after element".into(),
                })?;
                let ls: Vec<usize> = match letter.to_ascii_uppercase().as_str() {
                    "S" => vec![0],
                    "P" => vec![1],
                    "D" => vec![2],
                    "SP" => vec![0, 1],
                    other => {
                        return Err(BasisError::Parse {
                            line: ln,
                            msg: format!("unsupported shell letter '{other}'"),
                        })
                    }
                };
                let n = ls.len();
                current = Some((z, ls, vec![Vec::new(); n]));
            } else {
                let (_, ls, prim_sets) = current.as_mut().ok_or_else(|| BasisError::Parse {
                    line: ln,
                    msg: "primitive row before any element/shell header".into(),
                })?;
                let vals: Result<Vec<f64>, _> =
                    line.split_whitespace().map(|t| t.parse::<f64>()).collect();
                let vals = vals.map_err(|_| BasisError::Parse {
                    line: ln,
                    msg: "bad number in primitive row".into(),
                })?;
                if vals.len() != 1 + ls.len() {
                    return Err(BasisError::Parse {
                        line: ln,
                        msg: format!(
                            "expected exponent plus {} coefficient(s), got {} values",
                            ls.len(),
                            vals.len()
                        ),
                    });
                }
                let exponent = vals[0];
                if exponent <= 0.0 {
                    return Err(BasisError::BadExponent { value: exponent });
                }
                for (slot, &c) in prim_sets.iter_mut().zip(&vals[1..]) {
                    slot.push(Primitive {
                        exponent,
                        coefficient: c,
                    });
                }
            }
        }
        flush(&mut current)?;
        if elements.is_empty() {
            return Err(BasisError::Parse {
                line: 0,
                msg: "no shells found".into(),
            });
        }
        let mut lib = BasisLibrary {
            name: name.to_string(),
            elements,
            checksum: String::new(),
        };
        lib.checksum = sha256_hex(lib.canonical_text().as_bytes());
        Ok(lib)
    }

    /// Deterministic re-serialization; the checksum is taken over this.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (z, shells) in &self.elements {
            for (l, prims) in shells {
                let letter = ["S", "P", "D"][*l];
                let _ = writeln!(s, "{} {}", Geometry::symbol_of(*z), letter);
                for p in prims {
                    let _ = writeln!(s, "  {} {}", p.exponent, p.coefficient);
                }
            }
        }
        s
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    /// Instantiate the library over a geometry: every atom receives its
    /// element's shells in file order.
    pub fn build(&self, geom: &Geometry) -> Result<BasisSet, BasisError> {
        let mut shells = Vec::new();
        for (ai, atom) in geom.atoms.iter().enumerate() {
            let templates = self
                .elements
                .get(&atom.z)
                .ok_or(BasisError::MissingElement { z: atom.z })?;
            for (l, prims) in templates {
                shells.push(Shell {
                    atom: ai,
                    l: *l,
                    primitives: prims.clone(),
                });
            }
        }
        BasisSet::new(shells, geom.n_atoms(), &self.name, &self.checksum)
    }
}

/// A basis set bound to atom indices of a concrete geometry.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub shells: Vec<Shell>,
    pub n_b: usize,
    pub name: String,
    pub checksum: String,
    functions: Vec<CartFunction>,
}

impl BasisSet {
    pub fn new(
        shells: Vec<Shell>,
        n_atoms: usize,
        name: &str,
        checksum: &str,
    ) -> Result<Self, BasisError> {
        let mut functions = Vec::new();
        for (si, shell) in shells.iter().enumerate() {
            if shell.atom >= n_atoms {
                return Err(BasisError::BadAtomIndex {
                    shell: si,
                    atom: shell.atom,
                    n_atoms,
                });
            }
            for p in &shell.primitives {
                if p.exponent <= 0.0 {
                    return Err(BasisError::BadExponent { value: p.exponent });
                }
            }
            for lmn in cart_components(shell.l) {
                functions.push(normalized_function(shell, *lmn));
            }
        }
        let n_b = functions.len();
        Ok(BasisSet {
            shells,
            n_b,
            name: name.to_string(),
            checksum: checksum.to_string(),
            functions,
        })
    }

    /// The flat list of normalized Cartesian functions, in shell order with
    /// the canonical component order inside each shell.
    pub fn functions(&self) -> &[CartFunction] {
        &self.functions
    }
}

/// Build one Cartesian component of a contracted shell with primitive and
/// contracted normalization folded into the coefficients.
fn normalized_function(shell: &Shell, lmn: [usize; 3]) -> CartFunction {
    let mut prims: Vec<(f64, f64)> = shell
        .primitives
        .iter()
        .map(|p| {
            (
                p.exponent,
                p.coefficient * primitive_norm(p.exponent, lmn),
            )
        })
        .collect();
    // unit self-overlap of the contracted function
    let mut self_ov = 0.0;
    for &(a, ca) in &prims {
        for &(b, cb) in &prims {
            self_ov += ca * cb * same_center_overlap(a, b, lmn);
        }
    }
    let scale = 1.0 / self_ov.sqrt();
    for p in prims.iter_mut() {
        p.1 *= scale;
    }
    CartFunction {
        atom: shell.atom,
        lmn,
        prims,
    }
}

/// Norm of a primitive Cartesian Gaussian x^i y^j z^k exp(-a r^2).
fn primitive_norm(a: f64, [i, j, k]: [usize; 3]) -> f64 {
    let l = (i + j + k) as i32;
    let num = (2.0 * a / std::f64::consts::PI).powf(0.75) * (4.0 * a).powi(l).sqrt();
    let den = (double_factorial(i) * double_factorial(j) * double_factorial(k)).sqrt();
    num / den
}

/// Closed-form self-overlap of two unnormalized primitives with identical
/// center and identical Cartesian exponents.
fn same_center_overlap(a: f64, b: f64, [i, j, k]: [usize; 3]) -> f64 {
    let p = a + b;
    let pref = (std::f64::consts::PI / p).powf(1.5);
    pref * double_factorial(i) * double_factorial(j) * double_factorial(k)
        / (2.0 * p).powi((i + j + k) as i32)
}

/// (2n - 1)!! with the empty-product convention for n = 0.
pub fn double_factorial(n: usize) -> f64 {
    let mut r = 1.0;
    let mut k = 2.0 * n as f64 - 1.0;
    while k > 1.0 {
        r *= k;
        k -= 2.0;
    }
    r
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        let _ = write!(s, "{b:02x}");
    }
    s
}
