//! JSON instance files.
//!
//! ```json
//! {
//!   "s0": "1",
//!   "families": [
//!     {"kind": "delayed_jump", "label": "U", "prefix": ["1", "2"],
//!      "plateau": "2", "jump_to": "4"},
//!     {"kind": "explicit", "trajectories": [
//!        {"label": "D", "breakpoints": [[0, "1"], [1, "0"]]},
//!        {"label": "Z", "path": ["1"]}]}
//!   ],
//!   "regime": {"N": 4, "M": 3}
//! }
//! ```
//!
//! Rationals are strings `"p/q"`; plain JSON integers are also accepted.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, ParseRationalError, Rational, RawRational};

use super::family::{DelayedJump, Member, TrajectoryFamily};
use super::{build_instance, Instance, ModelError, Regime, Trajectory};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad rational in field `{field}`: {source}")]
    Rational {
        field: String,
        #[source]
        source: ParseRationalError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub s0: RawRational,
    pub families: Vec<FamilyFile>,
    pub regime: RegimeFile,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeFile {
    #[serde(rename = "N")]
    pub truncation: usize,
    #[serde(rename = "M")]
    pub maturity_cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyFile {
    Explicit {
        trajectories: Vec<TrajectoryFile>,
    },
    DelayedJump {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        prefix: Vec<RawRational>,
        plateau: RawRational,
        jump_to: RawRational,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<(usize, RawRational)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<RawRational>>,
}

fn rational(raw: &RawRational, field: &str) -> Result<Rational, LoadError> {
    raw.clone()
        .into_rational()
        .map_err(|source| LoadError::Rational {
            field: field.to_string(),
            source,
        })
}

fn raw(v: &Rational) -> RawRational {
    RawRational::Text(format_rational(v))
}

impl InstanceFile {
    pub fn from_families(s0: &Rational, families: &[TrajectoryFamily], regime: Regime) -> Self {
        let families = families
            .iter()
            .map(|f| match f {
                TrajectoryFamily::Explicit(members) => FamilyFile::Explicit {
                    trajectories: members
                        .iter()
                        .map(|m| TrajectoryFile {
                            label: m.label.clone(),
                            breakpoints: Some(
                                m.trajectory
                                    .breakpoints()
                                    .iter()
                                    .map(|(t, v)| (*t, raw(v)))
                                    .collect(),
                            ),
                            path: None,
                        })
                        .collect(),
                },
                TrajectoryFamily::DelayedJump(dj) => FamilyFile::DelayedJump {
                    label: dj.label.clone(),
                    prefix: dj.prefix.iter().map(raw).collect(),
                    plateau: raw(&dj.plateau),
                    jump_to: raw(&dj.jump_to),
                },
            })
            .collect();
        Self {
            s0: raw(s0),
            families,
            regime: RegimeFile {
                truncation: regime.truncation,
                maturity_cap: regime.maturity_cap,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance file serializes")
    }

    /// Resolves rationals and families without building the tree.
    pub fn decode(&self) -> Result<(Rational, Vec<TrajectoryFamily>, Regime), LoadError> {
        let s0 = rational(&self.s0, "s0")?;
        let mut families = Vec::new();
        for (fi, fam) in self.families.iter().enumerate() {
            match fam {
                FamilyFile::Explicit { trajectories } => {
                    let mut members = Vec::new();
                    for (ti, t) in trajectories.iter().enumerate() {
                        let field = format!("families[{fi}].trajectories[{ti}]");
                        let trajectory = match (&t.breakpoints, &t.path) {
                            (Some(bps), None) => {
                                let pts = bps
                                    .iter()
                                    .map(|(time, v)| Ok((*time, rational(v, &field)?)))
                                    .collect::<Result<Vec<_>, LoadError>>()?;
                                Trajectory::from_breakpoints(pts)?
                            }
                            (None, Some(values)) => {
                                let vals = values
                                    .iter()
                                    .map(|v| rational(v, &field))
                                    .collect::<Result<Vec<_>, _>>()?;
                                Trajectory::from_path(vals)?
                            }
                            _ => {
                                return Err(ModelError::InvalidTrajectory(format!(
                                    "{field}: give exactly one of `breakpoints` or `path`"
                                ))
                                .into())
                            }
                        };
                        members.push(Member {
                            label: t.label.clone(),
                            trajectory,
                        });
                    }
                    families.push(TrajectoryFamily::Explicit(members));
                }
                FamilyFile::DelayedJump {
                    label,
                    prefix,
                    plateau,
                    jump_to,
                } => {
                    let field = format!("families[{fi}]");
                    families.push(TrajectoryFamily::DelayedJump(DelayedJump {
                        label: label.clone(),
                        prefix: prefix
                            .iter()
                            .map(|v| rational(v, &format!("{field}.prefix")))
                            .collect::<Result<_, _>>()?,
                        plateau: rational(plateau, &format!("{field}.plateau"))?,
                        jump_to: rational(jump_to, &format!("{field}.jump_to"))?,
                    }));
                }
            }
        }
        let regime = Regime::new(self.regime.truncation, self.regime.maturity_cap)?;
        Ok((s0, families, regime))
    }

    pub fn build(&self) -> Result<Instance, LoadError> {
        let (s0, families, regime) = self.decode()?;
        Ok(build_instance(s0, &families, regime)?)
    }
}

pub fn parse_instance(json: &str) -> Result<Instance, LoadError> {
    let file: InstanceFile = serde_json::from_str(json)?;
    file.build()
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCN_C: &str = r#"{
        "s0": "1",
        "families": [
            {"kind": "delayed_jump", "label": "U", "prefix": ["1", "2"], "plateau": "2", "jump_to": 4},
            {"kind": "explicit", "trajectories": [
                {"label": "D", "breakpoints": [[0, "1"], [1, "0"]]},
                {"label": "Z", "path": ["1"]}
            ]}
        ],
        "regime": {"N": 4, "M": 3}
    }"#;

    #[test]
    fn loads_emulation_instance() {
        let inst = parse_instance(SCN_C).unwrap();
        assert_eq!(inst.num_classes(), 6);
        assert!(!inst.is_exact());
    }

    #[test]
    fn zero_denominator_is_semantic_error() {
        let bad = SCN_C.replace(r#""plateau": "2""#, r#""plateau": "1/0""#);
        match parse_instance(&bad) {
            Err(LoadError::Rational { field, .. }) => assert_eq!(field, "families[0].plateau"),
            other => panic!("expected rational error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_instance("{\n  \"s0\": \"1\",\n  oops\n}").unwrap_err();
        match err {
            LoadError::Parse(e) => assert_eq!(e.line(), 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trips_through_file_format() {
        let inst = parse_instance(SCN_C).unwrap();
        let file: InstanceFile = serde_json::from_str(SCN_C).unwrap();
        let (s0, fams, regime) = file.decode().unwrap();
        let again =
            parse_instance(&InstanceFile::from_families(&s0, &fams, regime).to_json()).unwrap();
        assert_eq!(again.classes(), inst.classes());
        assert_eq!(again.labels(), inst.labels());
    }
}
