//! Nuclear configurations and analytic one-parameter trajectories.

use thiserror::Error;

/// 1 angstrom in bohr.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

/// Two nuclei closer than this (bohr) make a geometry degenerate.
pub const NUCLEAR_COINCIDENCE_THRESHOLD: f64 = 1e-8;

/// Element symbols for Z = 1..=18, used by the text formats.
const SYMBOLS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar",
];

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("nuclei {i} and {j} coincide (distance {dist:.3e} bohr)")]
    DegenerateGeometry { i: usize, j: usize, dist: f64 },
    #[error("geometry parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("mu = {mu} outside trajectory domain [{lo}, {hi}]")]
    OutOfDomain { mu: f64, lo: f64, hi: f64 },
    #[error("mode {index} has displacement length {got}, expected {want} (3 per atom)")]
    ModeLength { index: usize, got: usize, want: usize },
}

/// One nucleus: atomic number and position in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub z: u32,
    pub pos: [f64; 3],
}

/// A nuclear configuration. All positions are in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub atoms: Vec<Atom>,
}

impl Geometry {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, GeomError> {
        let g = Geometry { atoms };
        g.check_distinct()?;
        Ok(g)
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Electron count of the neutral molecule.
    pub fn n_electrons_neutral(&self) -> usize {
        self.atoms.iter().map(|a| a.z as usize).sum()
    }

    fn check_distinct(&self) -> Result<(), GeomError> {
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                let d = dist(&self.atoms[i].pos, &self.atoms[j].pos);
                if d < NUCLEAR_COINCIDENCE_THRESHOLD {
                    return Err(GeomError::DegenerateGeometry { i, j, dist: d });
                }
            }
        }
        Ok(())
    }

    /// Parse the plain-text geometry format: a unit header line
    /// ("bohr" | "angstrom"), then one "SYMBOL x y z" line per atom.
    /// Blank lines and lines starting with '#' are ignored.
    pub fn parse(text: &str) -> Result<Self, GeomError> {
        let mut unit: Option<f64> = None;
        let mut atoms = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if unit.is_none() {
                unit = Some(parse_unit(line, ln + 1)?);
                continue;
            }
            atoms.push(parse_atom_line(line, ln + 1, unit.unwrap())?);
        }
        if atoms.is_empty() {
            return Err(GeomError::Parse {
                line: 0,
                msg: "no atoms found".into(),
            });
        }
        Geometry::new(atoms)
    }

    pub fn symbol_of(z: u32) -> &'static str {
        SYMBOLS
            .get(z as usize - 1)
            .copied()
            .unwrap_or("X")
    }

    pub fn z_of_symbol(sym: &str) -> Option<u32> {
        SYMBOLS
            .iter()
            .position(|s| s.eq_ignore_ascii_case(sym))
            .map(|p| p as u32 + 1)
    }
}

fn parse_unit(line: &str, ln: usize) -> Result<f64, GeomError> {
    match line.to_ascii_lowercase().as_str() {
        "bohr" => Ok(1.0),
        "angstrom" => Ok(ANGSTROM_TO_BOHR),
        other => Err(GeomError::Parse {
            line: ln,
            msg: format!("expected unit header 'bohr' or 'angstrom', got '{other}'"),
        }),
    }
}

fn parse_atom_line(line: &str, ln: usize, unit: f64) -> Result<Atom, GeomError> {
    let mut it = line.split_whitespace();
    let sym = it.next().ok_or_else(|| GeomError::Parse {
        line: ln,
        msg: "empty atom line".into(),
    })?;
    let z = Geometry::z_of_symbol(sym).ok_or_else(|| GeomError::Parse {
        line: ln,
        msg: format!("unknown element symbol '{sym}'"),
    })?;
    let mut pos = [0.0; 3];
    for slot in pos.iter_mut() {
        let tok = it.next().ok_or_else(|| GeomError::Parse {
            line: ln,
            msg: "expected three coordinates".into(),
        })?;
        *slot = tok.parse::<f64>().map_err(|_| GeomError::Parse {
            line: ln,
            msg: format!("bad coordinate '{tok}'"),
        })? * unit;
    }
    if it.next().is_some() {
        return Err(GeomError::Parse {
            line: ln,
            msg: "trailing tokens after coordinates".into(),
        });
    }
    Ok(Atom { z, pos })
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// A sinusoidal displacement mode: coefficient, frequency (per unit mu) and
/// a 3M-component displacement vector in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub coeff: f64,
    pub freq: f64,
    pub displacement: Vec<f64>,
}

/// An analytic path through nuclear coordinate space:
/// Gamma(mu) = Gamma_0 + sum_s c_s sin(2 pi w_s mu) zeta_s.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub gamma0: Geometry,
    pub modes: Vec<Mode>,
    pub domain: (f64, f64),
}

impl Trajectory {
    pub fn new(gamma0: Geometry, modes: Vec<Mode>) -> Result<Self, GeomError> {
        let want = 3 * gamma0.n_atoms();
        for (index, m) in modes.iter().enumerate() {
            if m.displacement.len() != want {
                return Err(GeomError::ModeLength {
                    index,
                    got: m.displacement.len(),
                    want,
                });
            }
        }
        Ok(Trajectory {
            gamma0,
            modes,
            domain: (0.0, 1.0),
        })
    }

    /// Geometry at parameter `mu`. Atomic numbers are copied from Gamma_0;
    /// the returned geometry is validated for distinct nuclei.
    pub fn eval(&self, mu: f64) -> Result<Geometry, GeomError> {
        let (lo, hi) = self.domain;
        if !(lo..=hi).contains(&mu) {
            return Err(GeomError::OutOfDomain { mu, lo, hi });
        }
        let mut atoms = self.gamma0.atoms.clone();
        for m in &self.modes {
            let amp = m.coeff * (2.0 * std::f64::consts::PI * m.freq * mu).sin();
            for (j, atom) in atoms.iter_mut().enumerate() {
                for k in 0..3 {
                    atom.pos[k] += amp * m.displacement[3 * j + k];
                }
            }
        }
        Geometry::new(atoms)
    }

    /// Parse the trajectory text format: the geometry block (unit header plus
    /// atom lines), then one `mode c_s w_s d1 d2 ... d3M` line per mode.
    pub fn parse(text: &str) -> Result<Self, GeomError> {
        let mut geom_lines = String::new();
        let mut modes = Vec::new();
        let mut n_atoms = 0usize;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("mode") {
                let vals: Result<Vec<f64>, _> =
                    rest.split_whitespace().map(|t| t.parse::<f64>()).collect();
                let vals = vals.map_err(|_| GeomError::Parse {
                    line: ln + 1,
                    msg: "bad number in mode line".into(),
                })?;
                if vals.len() != 2 + 3 * n_atoms {
                    return Err(GeomError::Parse {
                        line: ln + 1,
                        msg: format!(
                            "mode line needs c, w and {} displacement components, got {} values",
                            3 * n_atoms,
                            vals.len()
                        ),
                    });
                }
                modes.push(Mode {
                    coeff: vals[0],
                    freq: vals[1],
                    displacement: vals[2..].to_vec(),
                });
            } else {
                if !modes.is_empty() {
                    return Err(GeomError::Parse {
                        line: ln + 1,
                        msg: "geometry lines must precede mode lines".into(),
                    });
                }
                geom_lines.push_str(line);
                geom_lines.push('\n');
                // count atom lines (everything after the unit header)
                let lower = line.to_ascii_lowercase();
                if lower != "bohr" && lower != "angstrom" {
                    n_atoms += 1;
                }
            }
        }
        let gamma0 = Geometry::parse(&geom_lines)?;
        Trajectory::new(gamma0, modes)
    }

    /// Canonical text form, used for checksums and manifests.
    pub fn descriptor(&self) -> String {
        let mut s = String::from("bohr\n");
        for a in &self.gamma0.atoms {
            s.push_str(&format!(
                "{} {} {} {}\n",
                Geometry::symbol_of(a.z),
                a.pos[0],
                a.pos[1],
                a.pos[2]
            ));
        }
        for m in &self.modes {
            s.push_str(&format!("mode {} {}", m.coeff, m.freq));
            for d in &m.displacement {
                s.push_str(&format!(" {d}"));
            }
            s.push('\n');
        }
        s
    }
}
