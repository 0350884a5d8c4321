use super::stats::{
    describe, format_mean_sd, rank_sum, wilcoxon_signed_rank, TestMethod, WilcoxonMode,
};
use super::TelemetryError;
use crate::story::Mode;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    EnvRealism,
    QuakeRealism,
    NpcRealism,
    Navigability,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::EnvRealism,
        Component::QuakeRealism,
        Component::NpcRealism,
        Component::Navigability,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Component::EnvRealism => "Building looks real",
            Component::QuakeRealism => "Shaking feels real",
            Component::NpcRealism => "Characters act real",
            Component::Navigability => "Moving around is easy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertResponse {
    pub participant: String,
    pub prototype: Mode,
    pub component: Component,
    pub score: i8,
}

impl LikertResponse {
    pub fn validate(&self) -> Result<(), TelemetryError> {
        if !(-3..=3).contains(&self.score) {
            return Err(TelemetryError::InvalidResponse(format!(
                "{} scored {} outside -3..=3",
                self.participant, self.score
            )));
        }
        Ok(())
    }
}

/// Parses a JSON array or JSON lines of responses.
pub fn parse_responses(text: &str) -> Result<Vec<LikertResponse>, TelemetryError> {
    let parse_err = |line, e: serde_json::Error| TelemetryError::Parse {
        line,
        msg: e.to_string(),
    };
    let out: Vec<LikertResponse> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e))?
    } else {
        let mut v = Vec::new();
        for (i, l) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            v.push(serde_json::from_str(l).map_err(|e| parse_err(i + 1, e))?);
        }
        v
    };
    for r in &out {
        r.validate()?;
    }
    Ok(out)
}

/// How the two prototypes are compared per component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Signed-rank test over participants who scored both prototypes.
    #[default]
    SignedRankPaired,
    /// Rank-sum test treating the groups as independent.
    RankSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRow {
    pub component: Component,
    pub bp: GroupStats,
    pub tp: GroupStats,
    pub p_value: Option<f64>,
    pub method: Option<TestMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentTable {
    pub comparison: Comparison,
    pub rows: Vec<AssessmentRow>,
    /// Distinct participants per prototype.
    pub participants: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

fn group(scores: &[f64]) -> GroupStats {
    match describe(scores) {
        Ok(r) => GroupStats {
            n: r.n,
            mean: Some(r.mean),
            sd: Some(r.sd),
        },
        Err(_) => GroupStats {
            n: scores.len(),
            mean: scores.first().copied(),
            sd: None,
        },
    }
}

fn scores_by_participant(
    rs: &[&LikertResponse],
    proto: Mode,
    c: Component,
) -> BTreeMap<String, f64> {
    rs.iter()
        .filter(|r| r.prototype == proto && r.component == c)
        .map(|r| (r.participant.clone(), f64::from(r.score)))
        .collect()
}

/// Per-component means and deviations for both prototypes with a p-value
/// comparing them.
pub fn summarize_assessment(
    responses: &[LikertResponse],
    comparison: Comparison,
) -> Result<AssessmentTable, TelemetryError> {
    for r in responses {
        r.validate()?;
    }
    let all: Vec<&LikertResponse> = responses.iter().collect();
    let mut warnings = Vec::new();
    let mut participants = BTreeMap::new();
    for (mode, key) in [(Mode::Bp, "bp"), (Mode::Tp, "tp")] {
        let ids: std::collections::BTreeSet<&str> = all
            .iter()
            .filter(|r| r.prototype == mode)
            .map(|r| r.participant.as_str())
            .collect();
        participants.insert(key.to_string(), ids.len());
    }
    if participants.values().any(|&n| n == 0) {
        warnings.push("responses cover only one prototype; p-values omitted".to_string());
    }
    let mut rows = Vec::new();
    for c in Component::ALL {
        let bp = scores_by_participant(&all, Mode::Bp, c);
        let tp = scores_by_participant(&all, Mode::Tp, c);
        let bpv: Vec<f64> = bp.values().copied().collect();
        let tpv: Vec<f64> = tp.values().copied().collect();
        let (p_value, method) = if bpv.is_empty() || tpv.is_empty() {
            (None, None)
        } else {
            match comparison {
                Comparison::RankSum => {
                    let r = rank_sum(&bpv, &tpv)?;
                    (r.p_value, r.method)
                }
                Comparison::SignedRankPaired => {
                    let (x, y): (Vec<f64>, Vec<f64>) = bp
                        .iter()
                        .filter_map(|(id, s)| tp.get(id).map(|t| (*s, *t)))
                        .unzip();
                    if x.is_empty() {
                        warnings.push(format!(
                            "{}: no participant scored both prototypes, so the signed-rank test has \
                             no pairs; use the rank-sum comparison for independent groups",
                            c.label()
                        ));
                        (None, None)
                    } else {
                        let r = wilcoxon_signed_rank(&x, &y, WilcoxonMode::Auto)?;
                        (Some(r.p_value), Some(r.method))
                    }
                }
            }
        };
        rows.push(AssessmentRow {
            component: c,
            bp: group(&bpv),
            tp: group(&tpv),
            p_value,
            method,
        });
    }
    Ok(AssessmentTable {
        comparison,
        rows,
        participants,
        warnings,
    })
}

impl AssessmentTable {
    /// Aligned text table, one row per component.
    pub fn render(&self) -> String {
        let cell = |g: &GroupStats| match (g.mean, g.sd) {
            (Some(m), Some(s)) => format_mean_sd(m, s),
            (Some(m), None) => format!("{m:.2} | -"),
            _ => "- | -".to_string(),
        };
        let lines: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                let p = r.p_value.map_or("-".to_string(), |p| format!("{p:.3}"));
                [r.component.label().to_string(), cell(&r.bp), cell(&r.tp), p]
            })
            .collect();
        let header = [
            "Component".to_string(),
            "BP mean | sd".to_string(),
            "TP mean | sd".to_string(),
            "p".to_string(),
        ];
        let mut w = [0usize; 4];
        for l in std::iter::once(&header).chain(&lines) {
            for (i, c) in l.iter().enumerate() {
                w[i] = w[i].max(c.len());
            }
        }
        let mut s = String::new();
        for l in std::iter::once(&header).chain(&lines) {
            let _ = writeln!(
                s,
                "{:<a$}   {:<b$}   {:<c$}   {}",
                l[0],
                l[1],
                l[2],
                l[3],
                a = w[0],
                b = w[1],
                c = w[2]
            );
        }
        let _ = writeln!(
            s,
            "BP n={}  TP n={}",
            self.participants.get("bp").copied().unwrap_or(0),
            self.participants.get("tp").copied().unwrap_or(0)
        );
        for warn in &self.warnings {
            let _ = writeln!(s, "warning: {warn}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub seed: u64,
    pub bp: Vec<String>,
    pub tp: Vec<String>,
}

/// Randomly splits participants `p001..pNNN` between the two prototypes.
/// `bp_size` defaults to half, rounded down.
pub fn assign(n: usize, bp_size: Option<usize>, seed: u64) -> Result<Assignment, TelemetryError> {
    let k = bp_size.unwrap_or(n / 2);
    if k > n {
        return Err(TelemetryError::InvalidResponse(format!(
            "cannot put {k} of {n} participants in one group"
        )));
    }
    let width = n.to_string().len().max(3);
    let mut ids: Vec<String> = (1..=n).map(|i| format!("p{i:0width$}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let tp = ids.split_off(k);
    let mut bp = ids;
    bp.sort();
    let mut tp = tp;
    tp.sort();
    Ok(Assignment { seed, bp, tp })
}
