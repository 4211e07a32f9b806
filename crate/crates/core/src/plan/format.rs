//! Versioned JSON plan files.
//!
//! Coefficients are stored as `{row, sign, exp}` integer records, so files
//! round-trip bit-exactly. Codebooks are stored as descriptors: mailman and
//! two-sparse by shape, self-designing by its two factors, Gaussian by seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DecompositionPlan, PlanMeta};
use crate::codebook::{Codebook, Entry, Pow2Matrix};
use crate::error::{malformed, Error, Result};
use crate::pot_arith::SignedPow2;
use crate::wiring::StageSchedule;

pub const FORMAT_NAME: &str = "lincode-plan";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u64,
}

#[derive(Serialize, Deserialize)]
struct Record {
    row: usize,
    sign: i8,
    exp: i32,
}

type Columns = Vec<Vec<Record>>;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum CodebookFile {
    Mailman { n: usize },
    TwoSparse { n: usize, k: usize },
    SelfDesigning { n: usize, k: usize, b1: Columns, b2: Columns },
    Gaussian { n: usize, k: usize, seed: u64 },
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    format: String,
    version: u64,
    n: usize,
    k: usize,
    /// Always `"reverse"`: `W_L` is applied to the input first.
    evaluation_order: String,
    codebook: CodebookFile,
    schedule: Option<StageSchedule>,
    seed: Option<u64>,
    target_hash: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, String>,
    stages: Vec<Columns>,
}

fn to_columns(m: &Pow2Matrix) -> Columns {
    m.columns()
        .iter()
        .map(|c| c.iter().map(|e| Record { row: e.row, sign: e.coeff.sign(), exp: e.coeff.exponent() }).collect())
        .collect()
}

fn from_columns(rows: usize, cols: Columns) -> Result<Pow2Matrix> {
    let columns = cols
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|r| match SignedPow2::from_parts(r.sign, r.exp) {
                    Some(coeff) if !coeff.is_zero() => Ok(Entry { row: r.row, coeff }),
                    _ => Err(malformed(format!("coefficient sign must be -1 or 1, got {}", r.sign))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Pow2Matrix::new(rows, columns).map_err(|e| malformed(e.to_string()))
}

impl DecompositionPlan {
    pub fn to_json(&self) -> String {
        let codebook = match self.codebook() {
            Codebook::Mailman { n } => CodebookFile::Mailman { n: *n },
            Codebook::TwoSparse { matrix } => CodebookFile::TwoSparse { n: matrix.rows(), k: matrix.cols() },
            Codebook::SelfDesigning { n, b1, b2 } => {
                CodebookFile::SelfDesigning { n: *n, k: b2.cols(), b1: to_columns(b1), b2: to_columns(b2) }
            }
            Codebook::Gaussian { n, k, seed } => CodebookFile::Gaussian { n: *n, k: *k, seed: *seed },
        };
        let file = PlanFile {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            n: self.rows(),
            k: self.cols(),
            evaluation_order: "reverse".into(),
            codebook,
            schedule: self.meta.schedule.clone(),
            seed: self.meta.seed,
            target_hash: self.meta.target_hash.clone(),
            params: self.meta.params.clone(),
            stages: self.stages().iter().map(to_columns).collect(),
        };
        serde_json::to_string(&file).expect("plan serializes")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_json().into_bytes()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        DecompositionPlan::from_bytes(text.as_bytes())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header: Header = serde_json::from_slice(bytes).map_err(|e| malformed(format!("plan header: {e}")))?;
        if header.format != FORMAT_NAME {
            return Err(malformed(format!("not a plan file (format {:?})", header.format)));
        }
        if header.version != FORMAT_VERSION {
            return Err(Error::Version { found: header.version, expected: FORMAT_VERSION });
        }
        let file: PlanFile = serde_json::from_slice(bytes).map_err(|e| malformed(format!("plan: {e}")))?;
        if file.evaluation_order != "reverse" {
            return Err(malformed(format!("unsupported evaluation order {:?}", file.evaluation_order)));
        }
        let codebook = match file.codebook {
            CodebookFile::Mailman { n } => Codebook::mailman(n),
            CodebookFile::TwoSparse { n, k } => Codebook::two_sparse(n, k),
            CodebookFile::SelfDesigning { n, k, b1, b2 } => {
                Codebook::self_designing(n, from_columns(k, b1)?, from_columns(k, b2)?)
            }
            CodebookFile::Gaussian { n, k, seed } => Ok(Codebook::gaussian(n, k, seed)),
        }
        .map_err(|e| malformed(format!("codebook: {e}")))?;
        if (codebook.rows(), codebook.cols()) != (file.n, file.k) {
            return Err(malformed(format!(
                "header shape {}x{} disagrees with codebook {}x{}",
                file.n,
                file.k,
                codebook.rows(),
                codebook.cols()
            )));
        }
        let stages = file.stages.into_iter().map(|s| from_columns(file.k, s)).collect::<Result<Vec<_>>>()?;
        let meta = PlanMeta { target_hash: file.target_hash, seed: file.seed, schedule: file.schedule, params: file.params };
        DecompositionPlan::new(codebook, stages, meta).map_err(|e| malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{gaussian_build, self_design_build};
    use crate::matrix::Matrix;
    use crate::wiring::decompose;

    fn sample_plan() -> DecompositionPlan {
        let t: Matrix<f64> = gaussian_build(4, 32, 5);
        let b = self_design_build(&t, 1).unwrap();
        let mut plan = decompose(&t, b, &StageSchedule::fixed(vec![1, 2])).unwrap();
        plan.meta.seed = Some(u64::MAX - 3);
        plan.meta.params.insert("stage_sparsity".into(), "1".into());
        plan
    }

    #[test]
    fn round_trip() {
        let plan = sample_plan();
        let back = DecompositionPlan::from_json(&plan.to_json()).unwrap();
        assert_eq!(back, plan);
        for b in [Codebook::mailman(3).unwrap(), Codebook::two_sparse(3, 8).unwrap(), Codebook::gaussian(3, 8, 1)] {
            let p = DecompositionPlan::new(b, vec![Pow2Matrix::identity(8)], PlanMeta::default()).unwrap();
            assert_eq!(DecompositionPlan::from_bytes(&p.to_bytes()).unwrap(), p);
        }
    }

    #[test]
    fn truncated_is_malformed() {
        let text = sample_plan().to_json();
        for cut in [0, 1, text.len() / 2, text.len() - 1] {
            assert!(matches!(DecompositionPlan::from_json(&text[..cut]), Err(Error::Malformed(_))));
        }
    }

    #[test]
    fn unknown_version() {
        let text = sample_plan().to_json().replacen("\"version\":1", "\"version\":7", 1);
        assert!(matches!(DecompositionPlan::from_json(&text), Err(Error::Version { found: 7, expected: 1 })));
    }

    #[test]
    fn bad_coefficients_rejected() {
        let text = sample_plan().to_json().replacen("\"sign\":1", "\"sign\":3", 1);
        assert!(matches!(DecompositionPlan::from_json(&text), Err(Error::Malformed(_))));
        let text = sample_plan().to_json().replacen("\"format\":\"lincode-plan\"", "\"format\":\"other\"", 1);
        assert!(matches!(DecompositionPlan::from_json(&text), Err(Error::Malformed(_))));
    }
}
