//! Certificate files and the JSON number format shared by every command.
//!
//! Floats are written with 17 significant digits in exponent form, so a
//! parse followed by a write reproduces the file byte for byte.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use tribrick_core::geometry::{Brick, EdgeId, Placement, SkewTriple};
use tribrick_core::optimizer::{SearchDomain, SearchSettings};
use tribrick_core::oracle::{BoundReport, Certificate, Match, Objective, OptimumId, Witness};

use crate::error::CliError;

/// Pretty JSON with every float at full double precision.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with full-precision floats and a
/// trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainRecord {
    pub min_side: f64,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsRecord {
    pub grid_n: usize,
    pub starts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleRecord {
    pub ex: String,
    pub ey: String,
    pub ez: String,
}

impl TripleRecord {
    pub fn from_triple(t: &SkewTriple) -> Self {
        TripleRecord { ex: t.ex().to_string(), ey: t.ey().to_string(), ez: t.ez().to_string() }
    }

    pub fn to_triple(&self) -> Result<SkewTriple, CliError> {
        let edge = |s: &str| s.parse::<EdgeId>().map_err(CliError::from);
        Ok(SkewTriple::new(edge(&self.ex)?, edge(&self.ey)?, edge(&self.ez)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessRecord {
    pub brick: [f64; 3],
    pub triple: TripleRecord,
    pub lambdas: [f64; 3],
    pub side_sq: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub optimum_sq: f64,
    pub witnesses: Vec<WitnessRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRecord {
    pub bound_sq: f64,
    pub satisfied: bool,
    pub margin: f64,
    pub sharp: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRecord {
    pub witness_index: usize,
    pub optimum_id: String,
}

/// On-disk layout of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub version: u32,
    pub objective: String,
    pub domain: DomainRecord,
    pub settings: SettingsRecord,
    pub result: ResultRecord,
    pub bound_check: BoundRecord,
    pub matched: Vec<MatchRecord>,
    pub timing_ms: u64,
}

impl From<&Certificate> for CertificateRecord {
    fn from(c: &Certificate) -> Self {
        CertificateRecord {
            version: c.version,
            objective: c.objective.tag().to_string(),
            domain: DomainRecord { min_side: c.domain.min_side, volume: c.domain.volume },
            settings: SettingsRecord {
                grid_n: c.settings.grid_n,
                starts: c.settings.starts,
                tol: c.settings.tol,
                max_iter: c.settings.max_iter,
                seed: c.settings.seed,
            },
            result: ResultRecord {
                optimum_sq: c.optimum_sq,
                witnesses: c
                    .witnesses
                    .iter()
                    .map(|w| WitnessRecord {
                        brick: w.brick.dims(),
                        triple: TripleRecord::from_triple(&w.placement.triple()),
                        lambdas: w.placement.lambdas(),
                        side_sq: w.side_sq,
                        residual: w.residual,
                    })
                    .collect(),
            },
            bound_check: BoundRecord {
                bound_sq: c.bound_check.bound_sq,
                satisfied: c.bound_check.satisfied,
                margin: c.bound_check.margin,
                sharp: c.bound_check.sharp,
            },
            matched: c
                .matched
                .iter()
                .map(|m| MatchRecord { witness_index: m.witness_index, optimum_id: m.optimum_id.tag().to_string() })
                .collect(),
            timing_ms: c.timing_ms,
        }
    }
}

impl CertificateRecord {
    /// Rebuilds the certificate. Recorded metrics are kept as written, not
    /// recomputed, so [`Certificate::witnesses_valid`] checks the file.
    pub fn to_certificate(&self) -> Result<Certificate, CliError> {
        let witnesses = self
            .result
            .witnesses
            .iter()
            .map(|w| {
                let [a, b, c] = w.brick;
                Ok(Witness {
                    brick: Brick::new(a, b, c)?,
                    placement: Placement::new(w.triple.to_triple()?, w.lambdas)?,
                    side_sq: w.side_sq,
                    residual: w.residual,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let matched = self
            .matched
            .iter()
            .map(|m| {
                if m.witness_index >= witnesses.len() {
                    return Err(CliError::Format("matched witness index out of range".into()));
                }
                Ok(Match { witness_index: m.witness_index, optimum_id: OptimumId::from_tag(&m.optimum_id)? })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Certificate {
            version: self.version,
            objective: Objective::from_tag(&self.objective)?,
            domain: SearchDomain { min_side: self.domain.min_side, volume: self.domain.volume, pinned: None },
            settings: SearchSettings {
                grid_n: self.settings.grid_n,
                starts: self.settings.starts,
                tol: self.settings.tol,
                max_iter: self.settings.max_iter,
                seed: self.settings.seed,
            },
            optimum_sq: self.result.optimum_sq,
            witnesses,
            bound_check: BoundReport {
                bound_sq: self.bound_check.bound_sq,
                satisfied: self.bound_check.satisfied,
                margin: self.bound_check.margin,
                sharp: self.bound_check.sharp,
            },
            matched,
            timing_ms: self.timing_ms,
        })
    }
}

pub fn certificate_to_json(cert: &Certificate) -> String {
    to_json(&CertificateRecord::from(cert))
}

pub fn certificate_from_json(text: &str) -> Result<Certificate, CliError> {
    let record: CertificateRecord = serde_json::from_str(text)?;
    record.to_certificate()
}
