//! Verification reports: named checks with verdicts and certificate digests.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{Complex, GradedMap, Tail};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    PassWindow { lo: i64, hi: i64 },
    Fail { witness: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::PassWindow { .. })
    }
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }
    pub fn fail(w: impl Into<String>) -> Verdict {
        Verdict::Fail { witness: w.into() }
    }
    pub fn inconclusive(r: impl Into<String>) -> Verdict {
        Verdict::Inconclusive { reason: r.into() }
    }
    fn rank(&self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::PassWindow { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
            Verdict::Fail { .. } => 3,
        }
    }
    pub fn label(&self) -> String {
        match self {
            Verdict::Pass => "pass".into(),
            Verdict::PassWindow { lo, hi } => format!("pass-window [{lo}, {hi}]"),
            Verdict::Fail { witness } => format!("fail ({witness})"),
            Verdict::Inconclusive { reason } => format!("inconclusive ({reason})"),
        }
    }
}

/// One named check. `method` records which tier produced the verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub digest: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, method: impl Into<String>) -> Check {
        Check { name: name.into(), verdict, method: method.into(), digest: None, notes: Vec::new() }
    }
    pub fn with_digest(mut self, d: String) -> Check {
        self.digest = Some(d);
        self
    }
    pub fn note(mut self, n: impl Into<String>) -> Check {
        self.notes.push(n.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub window: (i64, i64),
    pub budget: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, window: (i64, i64), budget: usize) -> VerificationReport {
        VerificationReport { subject: subject.into(), window, budget, checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Worst verdict over all checks (`Pass` for an empty report).
    pub fn overall(&self) -> Verdict {
        let mut worst = Verdict::Pass;
        let (mut lo, mut hi) = (i64::MIN, i64::MAX);
        for c in &self.checks {
            if let Verdict::PassWindow { lo: a, hi: b } = c.verdict {
                lo = lo.max(a);
                hi = hi.min(b);
            }
            if c.verdict.rank() > worst.rank() {
                worst = c.verdict.clone();
            }
        }
        match worst {
            Verdict::PassWindow { .. } => Verdict::PassWindow { lo, hi },
            v => v,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.is_pass())
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Stable `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("subject: {}\nwindow: {}:{}\nbudget: {}\n", self.subject, self.window.0, self.window.1, self.budget);
        for c in &self.checks {
            s.push_str(&format!("check {}: {} via {}", c.name, c.verdict.label(), c.method));
            if let Some(d) = &c.digest {
                s.push_str(&format!(" digest {}", &d[..16.min(d.len())]));
            }
            s.push('\n');
        }
        s.push_str(&format!("overall: {}\n", self.overall().label()));
        s
    }
}

fn feed_matrix(h: &mut Sha256, m: &Matrix) {
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for &v in m.data() {
        h.update(v.to_le_bytes());
    }
}

fn feed_tail(h: &mut Sha256, t: &Tail) {
    match t {
        Tail::Zero => h.update([0u8]),
        Tail::Periodic(m) => {
            h.update([1u8]);
            h.update((*m as u64).to_le_bytes());
        }
        Tail::Truncated(_) => h.update([2u8]),
    }
}

/// SHA-256 of a graded map's stored data (degree, core, tails, components).
pub fn digest_map(f: &GradedMap) -> String {
    let mut h = Sha256::new();
    h.update(f.degree().to_le_bytes());
    h.update(f.lo().to_le_bytes());
    feed_tail(&mut h, f.left());
    feed_tail(&mut h, f.right());
    for m in f.core_components() {
        feed_matrix(&mut h, m);
    }
    hex(h.finalize().as_slice())
}

/// SHA-256 of a complex's stored data.
pub fn digest_complex(x: &Complex) -> String {
    let mut h = Sha256::new();
    h.update(x.lo().to_le_bytes());
    feed_tail(&mut h, x.left());
    feed_tail(&mut h, x.right());
    for t in x.core_terms() {
        feed_matrix(&mut h, &t.generator_matrix());
        h.update((t.dim() as u64).to_le_bytes());
    }
    for d in x.core_diffs() {
        feed_matrix(&mut h, d);
    }
    hex(h.finalize().as_slice())
}

/// SHA-256 of any serializable value.
pub fn digest_json<T: Serialize>(v: &T) -> String {
    let s = serde_json::to_vec(v).expect("serializable");
    hex(Sha256::digest(&s).as_slice())
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}
