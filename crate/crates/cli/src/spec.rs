//! The TOML system description read by `--spec`.
//!
//! ```toml
//! n = 2
//! seed = 42
//! samples = 500
//! potential = ["x1^2", "u^2"]
//! energy = [1.0, 0.0]
//!
//! [[matrix.row]]
//! entries = ["x1", "1"]
//!
//! [[matrix.row]]
//! var = "u"
//! entries = ["u", "1"]
//!
//! [domain]
//! intervals = [[2.0, 3.0], [4.0, 5.0]]
//!
//! [tolerances]
//! commute = 1e-8
//! ```
//!
//! Row `i` may refer to its own coordinate as `x{i+1}`, `t`, or the name given
//! by `var`. Any reference to another coordinate is a row-locality error.

use serde::Deserialize;
use staeckel::gallery::{self, GalleryCase};
use staeckel::sampling::{DEFAULT_SAMPLES, DEFAULT_SEED};
use staeckel::separation::EnergyVector;
use staeckel::{Domain, Error, Expr, Parser, StaeckelMatrix};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub potential: Option<Vec<String>>,
    pub energy: Option<Vec<f64>>,
    pub matrix: MatrixSpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub row: Vec<RowSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub var: Option<String>,
    pub entries: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub involution: f64,
    pub eq6: f64,
    pub commute: f64,
    pub selfadjoint: f64,
    pub benenti: f64,
    pub eigen: f64,
    pub uncoupling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            involution: 1e-9,
            eq6: 1e-8,
            commute: 1e-8,
            selfadjoint: 1e-6,
            benenti: 1e-9,
            eigen: 1e-5,
            uncoupling: 1e-8,
        }
    }
}

impl Tolerances {
    /// Every tolerance replaced by `tol`.
    pub fn uniform(tol: f64) -> Self {
        Self {
            involution: tol,
            eq6: tol,
            commute: tol,
            selfadjoint: tol,
            benenti: tol,
            eigen: tol,
            uncoupling: tol,
        }
    }
}

/// Everything a command needs, from a spec file or a gallery case.
#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub matrix: StaeckelMatrix,
    pub domain: Domain,
    pub potential: Option<Vec<Expr>>,
    pub energy: Option<EnergyVector>,
    pub tolerances: Tolerances,
}

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Toml(toml::de::Error),
    Invalid(Error),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read spec: {e}"),
            LoadError::Toml(e) => write!(f, "malformed spec: {e}"),
            LoadError::Invalid(e) => write!(f, "invalid spec: {e}"),
        }
    }
}

impl From<Error> for LoadError {
    fn from(e: Error) -> Self {
        LoadError::Invalid(e)
    }
}

fn invalid(msg: String) -> LoadError {
    LoadError::Invalid(Error::InvalidArgument(msg))
}

impl SystemSpec {
    pub fn from_toml(text: &str) -> Result<Self, LoadError> {
        toml::from_str(text).map_err(LoadError::Toml)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, LoadError> {
        Self::from_toml(&std::fs::read_to_string(path).map_err(LoadError::Io)?)
    }

    fn row_parser(&self, i: usize) -> Parser {
        let p = Parser::new(self.n).alias("t", i);
        match &self.matrix.row[i].var {
            Some(v) => p.alias(v.clone(), i),
            None => p,
        }
    }

    pub fn into_system(self, name: String) -> Result<System, LoadError> {
        let n = self.n;
        if self.matrix.row.len() != n {
            return Err(invalid(format!(
                "n = {n} but the matrix has {} rows",
                self.matrix.row.len()
            )));
        }
        let entries = (0..n)
            .map(|i| {
                let p = self.row_parser(i);
                self.matrix.row[i]
                    .entries
                    .iter()
                    .map(|s| p.parse(s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let matrix = StaeckelMatrix::new(entries)?;
        let domain = Domain::new(
            self.domain.intervals.clone(),
            self.samples.unwrap_or(DEFAULT_SAMPLES),
            self.seed.unwrap_or(DEFAULT_SEED),
        )?;
        if domain.dim() != n {
            return Err(invalid(format!(
                "n = {n} but the domain has {} intervals",
                domain.dim()
            )));
        }
        let potential = match &self.potential {
            Some(v) if v.len() != n => {
                return Err(invalid(format!("expected {n} potentials, got {}", v.len())))
            }
            Some(v) => Some(
                v.iter()
                    .enumerate()
                    .map(|(i, s)| self.row_parser(i).parse(s))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        if let Some(v) = &potential {
            staeckel::staeckel::check_axis_functions(v, n)?;
        }
        let energy = match self.energy {
            Some(e) if e.len() != n => {
                return Err(invalid(format!("expected {n} energies, got {}", e.len())))
            }
            Some(e) => Some(EnergyVector::new(e)?),
            None => None,
        };
        Ok(System {
            name,
            matrix,
            domain,
            potential,
            energy,
            tolerances: self.tolerances,
        })
    }
}

impl System {
    pub fn from_case(case: GalleryCase) -> Self {
        System {
            name: case.name,
            matrix: case.matrix,
            domain: case.domain,
            potential: case.potential,
            energy: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_case_name(name: &str) -> Result<Self, LoadError> {
        Ok(Self::from_case(gallery::by_name(name)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VDM: &str = r#"
n = 2
potential = ["x1^2", "u^2"]
energy = [1.0, 0.0]

[[matrix.row]]
entries = ["x1", "1"]

[[matrix.row]]
var = "u"
entries = ["u", "1"]

[domain]
intervals = [[2.0, 3.0], [4.0, 5.0]]

[tolerances]
commute = 1e-7
"#;

    #[test]
    fn parses_aliases_and_defaults() {
        let s = SystemSpec::from_toml(VDM)
            .unwrap()
            .into_system("vdm".into())
            .unwrap();
        assert_eq!(s.matrix.entry(1, 0), &Expr::var(1));
        assert_eq!(s.domain.seed(), 42);
        assert_eq!(s.domain.samples(), 500);
        assert_eq!(s.tolerances.commute, 1e-7);
        assert_eq!(s.tolerances.eq6, 1e-8);
        assert_eq!(s.potential.unwrap()[1], Expr::var(1).powi(2));
    }

    #[test]
    fn row_locality_is_enforced_at_load() {
        let bad = VDM.replace(r#"entries = ["x1", "1"]"#, r#"entries = ["x1", "x2"]"#);
        let err = SystemSpec::from_toml(&bad)
            .unwrap()
            .into_system("bad".into())
            .unwrap_err();
        assert!(
            err.to_string().contains("entry (1, 2) depends on x2"),
            "{err}"
        );
    }

    #[test]
    fn shape_errors() {
        let bad = VDM.replace("n = 2", "n = 3");
        assert!(SystemSpec::from_toml(&bad)
            .unwrap()
            .into_system("bad".into())
            .is_err());
        let bad = VDM.replace("energy = [1.0, 0.0]", "energy = [1.0]");
        assert!(SystemSpec::from_toml(&bad)
            .unwrap()
            .into_system("bad".into())
            .is_err());
        assert!(SystemSpec::from_toml("n = ").is_err());
    }
}
