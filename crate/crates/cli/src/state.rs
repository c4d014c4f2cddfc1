//! State files and built-in state generators.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::path::Path;

use bilocal_core::monogamy::{w_state, WStateParams};
use bilocal_core::qalg::{
    density_from_ket, random_density, ComplexMatrix, DensityMatrix, Ket, MAX_QUBITS,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::report::sha256_hex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ket,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Ket(Vec<[f64; 2]>),
    Density(Vec<Vec<[f64; 2]>>),
}

/// On-disk state: amplitudes or matrix entries as `[re, im]` pairs in
/// computational-basis order, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub qubits: usize,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub data: Data,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn pair_text(p: &[f64; 2]) -> String {
    serde_json::to_string(p).expect("finite pair serializes")
}

impl StateFile {
    pub fn from_ket(ket: &Ket, label: Option<String>) -> Self {
        Self {
            qubits: ket.num_qubits(),
            kind: Kind::Ket,
            label,
            data: Data::Ket(ket.amplitudes().iter().copied().map(pair).collect()),
        }
    }

    pub fn from_density(rho: &DensityMatrix, label: Option<String>) -> Self {
        let m = rho.matrix();
        let rows = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect())
            .collect();
        Self {
            qubits: rho.num_qubits(),
            kind: Kind::Density,
            label,
            data: Data::Density(rows),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("malformed state file: {e}")))
    }

    /// JSON text with one amplitude, or one matrix row, per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"qubits\": {},", self.qubits);
        let kind = match self.kind {
            Kind::Ket => "ket",
            Kind::Density => "density",
        };
        let _ = writeln!(out, "  \"kind\": \"{kind}\",");
        if let Some(label) = &self.label {
            let _ = writeln!(out, "  \"label\": {},", serde_json::Value::from(label.as_str()));
        }
        let lines: Vec<String> = match &self.data {
            Data::Ket(v) => v.iter().map(pair_text).collect(),
            Data::Density(rows) => rows
                .iter()
                .map(|r| format!("[{}]", r.iter().map(pair_text).collect::<Vec<_>>().join(", ")))
                .collect(),
        };
        out.push_str("  \"data\": [\n");
        for (i, l) in lines.iter().enumerate() {
            let sep = if i + 1 < lines.len() { "," } else { "" };
            let _ = writeln!(out, "    {l}{sep}");
        }
        out.push_str("  ]\n}\n");
        out
    }

    /// Validates shape, then the state invariants.
    pub fn to_density(&self) -> CliResult<DensityMatrix> {
        let n = self.qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(CliError::Parse(format!(
                "qubits = {n} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n;
        let to_c = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
        match (&self.data, self.kind) {
            (Data::Ket(v), Kind::Ket) => {
                if v.len() != dim {
                    return Err(CliError::Parse(format!(
                        "ket of {n} qubits needs {dim} amplitudes, found {}",
                        v.len()
                    )));
                }
                let ket = Ket::from_amplitudes(v.iter().map(to_c).collect())?;
                Ok(density_from_ket(&ket)?)
            }
            (Data::Density(rows), Kind::Density) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::Parse(format!(
                        "density matrix of {n} qubits must be {dim}x{dim}"
                    )));
                }
                let data = rows.iter().flatten().map(to_c).collect();
                Ok(DensityMatrix::new(ComplexMatrix::from_vec(dim, dim, data)?)?)
            }
            _ => Err(CliError::Parse(
                "\"data\" layout does not match \"kind\"".into(),
            )),
        }
    }
}

/// A built-in generator named on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Bell,
    Ghz,
    W { mu0: f64, mu1: f64 },
    Mixed,
    Random { seed: u64 },
}

/// Rank of the mixed states produced by the `random` generator.
pub const RANDOM_RANK: usize = 4;

impl StateSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        let bad = || {
            CliError::Parse(format!(
                "unknown state generator '{s}' (expected bell, ghz, w:MU0,MU1, mixed or random:SEED)"
            ))
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("bell", None) => Ok(Self::Bell),
            ("ghz", None) => Ok(Self::Ghz),
            ("mixed", None) => Ok(Self::Mixed),
            ("w", Some(a)) => {
                let (m0, m1) = a.split_once(',').ok_or_else(bad)?;
                let mu0 = m0.trim().parse().map_err(|_| bad())?;
                let mu1 = m1.trim().parse().map_err(|_| bad())?;
                Ok(Self::W { mu0, mu1 })
            }
            ("random", Some(a)) => Ok(Self::Random {
                seed: a.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }

    pub fn generate(&self, qubits: usize, label: &str) -> CliResult<StateFile> {
        let label = Some(label.to_string());
        match *self {
            Self::Bell => {
                if qubits != 2 {
                    return Err(CliError::Parse(format!(
                        "bell is a two-qubit state, {qubits} qubits needed here"
                    )));
                }
                let ket = Ket::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])?;
                Ok(StateFile::from_ket(&ket, label))
            }
            Self::Ghz => {
                if !(2..=MAX_QUBITS).contains(&qubits) {
                    return Err(CliError::Parse(format!("ghz needs 2..={MAX_QUBITS} qubits")));
                }
                let mut amps = vec![0.0; 1 << qubits];
                amps[0] = FRAC_1_SQRT_2;
                amps[(1 << qubits) - 1] = FRAC_1_SQRT_2;
                Ok(StateFile::from_ket(&Ket::from_real(&amps)?, label))
            }
            Self::W { mu0, mu1 } => {
                if qubits != 3 {
                    return Err(CliError::Parse(format!(
                        "w is a three-qubit state, {qubits} qubits needed here"
                    )));
                }
                let ket = w_state(WStateParams::new(mu0, mu1)?);
                Ok(StateFile::from_ket(&ket, label))
            }
            Self::Mixed => Ok(StateFile::from_density(
                &DensityMatrix::maximally_mixed(qubits)?,
                label,
            )),
            Self::Random { seed } => {
                let rank = RANDOM_RANK.min(1 << qubits.min(MAX_QUBITS));
                Ok(StateFile::from_density(
                    &random_density(qubits, rank, seed)?,
                    label,
                ))
            }
        }
    }
}

/// A validated state together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedState {
    /// File path, or `generator:<spec>`.
    pub source: String,
    pub sha256: String,
    pub label: Option<String>,
    pub rho: DensityMatrix,
}

pub fn load_file(path: &Path) -> CliResult<LoadedState> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Parse(format!("{} is not UTF-8", path.display())))?;
    let file = StateFile::parse(text)?;
    Ok(LoadedState {
        source: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        label: file.label.clone(),
        rho: file.to_density()?,
    })
}

pub fn load_generated(spec: &str, qubits: usize) -> CliResult<LoadedState> {
    let file = StateSpec::parse(spec)?.generate(qubits, spec)?;
    let text = file.to_json();
    Ok(LoadedState {
        source: format!("generator:{spec}"),
        sha256: sha256_hex(text.as_bytes()),
        label: file.label.clone(),
        rho: file.to_density()?,
    })
}
