//! Constitution: maps trust levels to actions and carries verifier settings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::crosscheck::CrossCheckConfig;
use crate::engine::{TrustLevel, TrustPolicy, TrustReport, VerdictKind, VerifyOptions};
use crate::receipt::{FactExtractorConfig, FactPath, FactSelector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Pass,
    Warn,
    Block,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Pass => "pass",
            Action::Warn => "warn",
            Action::Block => "block",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paranoid,
    Standard,
    Permissive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Paranoid => "paranoid",
            Mode::Standard => "standard",
            Mode::Permissive => "permissive",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paranoid" => Some(Mode::Paranoid),
            "standard" => Some(Mode::Standard),
            "permissive" => Some(Mode::Permissive),
            _ => None,
        }
    }

    /// Preset action table.
    pub fn preset(self) -> ActionTable {
        use Action::*;
        let (fully, mostly, partial, unreliable, ungrounded) = match self {
            Mode::Paranoid => (Pass, Warn, Block, Block, Block),
            Mode::Standard => (Pass, Pass, Warn, Warn, Pass),
            Mode::Permissive => (Pass, Pass, Pass, Warn, Pass),
        };
        ActionTable {
            fully_verified: fully,
            mostly_verified: mostly,
            partial,
            unreliable,
            ungrounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTable {
    pub fully_verified: Action,
    pub mostly_verified: Action,
    pub partial: Action,
    pub unreliable: Action,
    pub ungrounded: Action,
}

impl ActionTable {
    pub fn action_for(&self, level: TrustLevel) -> Action {
        match level {
            TrustLevel::FullyVerified => self.fully_verified,
            TrustLevel::MostlyVerified => self.mostly_verified,
            TrustLevel::Partial => self.partial,
            TrustLevel::Unreliable => self.unreliable,
            TrustLevel::Ungrounded => self.ungrounded,
        }
    }
}

/// Validated verifier configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Constitution {
    pub mode: Mode,
    pub actions: ActionTable,
    pub thresholds: TrustPolicy,
    pub fetch_tools: Vec<String>,
    pub facts: FactExtractorConfig,
    pub crosscheck: CrossCheckConfig,
}

impl Default for Constitution {
    fn default() -> Self {
        Constitution::preset(Mode::Standard)
    }
}

impl Constitution {
    pub fn preset(mode: Mode) -> Self {
        Constitution {
            mode,
            actions: mode.preset(),
            thresholds: TrustPolicy::default(),
            fetch_tools: VerifyOptions::default().fetch_tools,
            facts: FactExtractorConfig::with_defaults(),
            crosscheck: CrossCheckConfig::default(),
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            fetch_tools: self.fetch_tools.clone(),
            policy: self.thresholds,
        }
    }

    /// Validates a deserialized document. Missing sections take the
    /// defaults of the selected mode.
    pub fn from_raw(raw: RawConstitution) -> Result<Self, ConstitutionError> {
        let mode = match &raw.mode {
            None => Mode::Standard,
            Some(ModeSpec::Name(n)) => Mode::parse(n).ok_or_else(|| bad_mode("mode", n))?,
            Some(ModeSpec::Table { preset }) => {
                Mode::parse(preset).ok_or_else(|| bad_mode("mode.preset", preset))?
            }
        };
        let mut c = Constitution::preset(mode);
        if let Some(a) = raw.actions {
            let t = &mut c.actions;
            t.fully_verified = a.fully_verified.unwrap_or(t.fully_verified);
            t.mostly_verified = a.mostly_verified.unwrap_or(t.mostly_verified);
            t.partial = a.partial.unwrap_or(t.partial);
            t.unreliable = a.unreliable.unwrap_or(t.unreliable);
            t.ungrounded = a.ungrounded.unwrap_or(t.ungrounded);
        }
        if mode == Mode::Paranoid {
            if c.actions.unreliable != Action::Block {
                return Err(err("actions.unreliable", "paranoid mode requires \"block\""));
            }
            if c.actions.partial == Action::Pass {
                return Err(err("actions.partial", "paranoid mode requires \"warn\" or \"block\""));
            }
        }
        if let Some(t) = raw.thresholds {
            c.thresholds.mostly_min = t.mostly_min.unwrap_or(c.thresholds.mostly_min);
            c.thresholds.partial_min = t.partial_min.unwrap_or(c.thresholds.partial_min);
            c.thresholds
                .validate()
                .map_err(|e| err("thresholds", &e.to_string()))?;
        }
        if let Some(fetch) = raw.tools.and_then(|t| t.fetch) {
            if fetch.tools.iter().any(|t| t.trim().is_empty()) {
                return Err(err("tools.fetch.tools", "tool names must be non-empty"));
            }
            c.fetch_tools = fetch.tools;
        }
        if let Some(facts) = raw.facts {
            for (tool, selectors) in facts {
                let mut list = Vec::new();
                for (key, path) in selectors {
                    let path: FactPath = path
                        .parse()
                        .map_err(|e| err(&format!("facts.{tool}.{key}"), &format!("{e}")))?;
                    list.push(FactSelector { key, path });
                }
                c.facts.tools.insert(tool, list);
            }
        }
        if let Some(x) = raw.crosscheck {
            let cc = &mut c.crosscheck;
            if let Some(v) = x.rel_tol {
                if !(v > 0.0 && v < 1.0) {
                    return Err(err("crosscheck.rel_tol", "must lie strictly between 0 and 1"));
                }
                cc.rel_tol = v;
            }
            if let Some(v) = x.future_skew_hours {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(err("crosscheck.future_skew_hours", "must be a finite non-negative number"));
                }
                cc.future_skew_hours = v;
            }
            if let Some(v) = x.fetch_timeout_ms {
                if v == 0 {
                    return Err(err("crosscheck.fetch_timeout_ms", "must be positive"));
                }
                cc.fetch_timeout_ms = v;
            }
        }
        Ok(c)
    }

    /// Full document form; `from_raw(c.to_raw())` reproduces `c`.
    pub fn to_raw(&self) -> RawConstitution {
        let a = self.actions;
        RawConstitution {
            mode: Some(ModeSpec::Name(self.mode.name().into())),
            actions: Some(RawActions {
                fully_verified: Some(a.fully_verified),
                mostly_verified: Some(a.mostly_verified),
                partial: Some(a.partial),
                unreliable: Some(a.unreliable),
                ungrounded: Some(a.ungrounded),
            }),
            thresholds: Some(RawThresholds {
                mostly_min: Some(self.thresholds.mostly_min),
                partial_min: Some(self.thresholds.partial_min),
            }),
            tools: Some(RawTools {
                fetch: Some(RawFetch {
                    tools: self.fetch_tools.clone(),
                }),
            }),
            facts: Some(
                self.facts
                    .tools
                    .iter()
                    .map(|(tool, sels)| {
                        (
                            tool.clone(),
                            sels.iter()
                                .map(|s| (s.key.clone(), s.path.to_string()))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
            crosscheck: Some(RawCrossCheck {
                rel_tol: Some(self.crosscheck.rel_tol),
                future_skew_hours: Some(self.crosscheck.future_skew_hours),
                fetch_timeout_ms: Some(self.crosscheck.fetch_timeout_ms),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConstitutionError {
    pub field: String,
    pub message: String,
}

fn err(field: &str, message: &str) -> ConstitutionError {
    ConstitutionError {
        field: field.into(),
        message: message.into(),
    }
}

fn bad_mode(field: &str, got: &str) -> ConstitutionError {
    err(
        field,
        &format!("unknown mode {got:?}; expected paranoid, standard or permissive"),
    )
}

/// Document shape of a constitution file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstitution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<RawActions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<RawThresholds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tools: Option<RawTools>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facts: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<RawCrossCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    Name(String),
    Table { preset: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawActions {
    pub fully_verified: Option<Action>,
    pub mostly_verified: Option<Action>,
    pub partial: Option<Action>,
    pub unreliable: Option<Action>,
    pub ungrounded: Option<Action>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawThresholds {
    pub mostly_min: Option<f64>,
    pub partial_min: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTools {
    pub fetch: Option<RawFetch>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFetch {
    pub tools: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCrossCheck {
    pub rel_tol: Option<f64>,
    pub future_skew_hours: Option<f64>,
    pub fetch_timeout_ms: Option<u64>,
}

/// A non-verified claim surfaced alongside the decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub claim: String,
    pub verdict: VerdictKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDecision {
    pub action: Action,
    pub trust: TrustLevel,
    pub annotations: Vec<Annotation>,
}

pub fn apply_policy(report: &TrustReport, constitution: &Constitution) -> PolicyDecision {
    PolicyDecision {
        action: constitution.actions.action_for(report.trust),
        trust: report.trust,
        annotations: report
            .claims
            .iter()
            .filter(|c| !c.verdict.kind.is_verified())
            .map(|c| Annotation {
                claim: c.claim.text.clone(),
                verdict: c.verdict.kind,
                detail: c.verdict.detail.clone(),
            })
            .collect(),
    }
}
