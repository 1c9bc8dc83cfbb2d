use serde::Serialize;

/// A single failing instance of a checked claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub k: u32,
    pub l: u32,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub detail: String,
}

/// Outcome of an exhaustive finite check. A failing report always carries at
/// least one counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub claim: String,
    pub passed: bool,
    pub checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl VerdictReport {
    pub fn new(claim: impl Into<String>) -> Self {
        VerdictReport {
            claim: claim.into(),
            passed: true,
            checked: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn record(&mut self, ok: bool, fail: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            self.counterexamples.push(fail());
        }
    }

    /// Folds `other` into `self`; counterexample order follows call order.
    pub fn absorb(&mut self, other: VerdictReport) {
        self.checked += other.checked;
        self.passed &= other.passed;
        self.counterexamples.extend(other.counterexamples);
    }
}
