//! Token and USD accounting.
//!
//! Image cost follows the 28-pixel patch-merge geometry: each side is
//! rounded to the nearest multiple of 28 (ties round up) and every
//! 28×28 cell is one token. A 1280×720 screenshot is therefore always
//! 46 × 26 = 1196 tokens regardless of what is on screen.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PATCH_SIZE: u32 = 28;
pub const DEFAULT_DIVISOR: u32 = 4;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("image dimension {0} is below the {PATCH_SIZE}-pixel minimum")]
    DimensionTooSmall(u32),
    #[error("ledger has no successful steps")]
    NoSuccessfulSteps,
    #[error("invalid USD amount `{0}`")]
    InvalidAmount(String),
    #[error("ledger: {0}")]
    Ledger(String),
    #[error("counter fixture: {0}")]
    Fixture(String),
}

fn round_to_patch(side: u32) -> u32 {
    (side + PATCH_SIZE / 2) / PATCH_SIZE * PATCH_SIZE
}

pub fn image_tokens(width: u32, height: u32) -> Result<u64, CostError> {
    for side in [width, height] {
        if side < PATCH_SIZE {
            return Err(CostError::DimensionTooSmall(side));
        }
    }
    let cols = round_to_patch(width) / PATCH_SIZE;
    let rows = round_to_patch(height) / PATCH_SIZE;
    Ok(u64::from(cols) * u64::from(rows))
}

/// Text token counting: exact counts from a lookup table when the text is
/// a known fixture key, otherwise `ceil(chars / divisor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenCounter {
    #[serde(default = "default_divisor")]
    pub divisor: u32,
    #[serde(default)]
    pub table: BTreeMap<String, u64>,
}

fn default_divisor() -> u32 {
    DEFAULT_DIVISOR
}

impl Default for TokenCounter {
    fn default() -> Self {
        TokenCounter::heuristic(DEFAULT_DIVISOR)
    }
}

impl TokenCounter {
    pub fn heuristic(divisor: u32) -> Self {
        TokenCounter {
            divisor: divisor.max(1),
            table: BTreeMap::new(),
        }
    }

    pub fn from_json(doc: &str) -> Result<Self, CostError> {
        let mut counter: TokenCounter = serde_json::from_str(doc).map_err(|e| CostError::Fixture(e.to_string()))?;
        if counter.divisor == 0 {
            return Err(CostError::Fixture("divisor must be positive".into()));
        }
        counter.divisor = counter.divisor.max(1);
        Ok(counter)
    }

    pub fn is_table(&self) -> bool {
        !self.table.is_empty()
    }

    pub fn count(&self, text: &str) -> u64 {
        if let Some(n) = self.table.get(text) {
            return *n;
        }
        let chars = text.chars().count() as u64;
        chars.div_ceil(u64::from(self.divisor))
    }
}

pub fn text_tokens(text: &str, counter: &TokenCounter) -> u64 {
    counter.count(text)
}

/// Everything fed to the model in one step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PromptParts {
    #[serde(default)]
    pub texts: Vec<String>,
    #[serde(default)]
    pub images: Vec<(u32, u32)>,
}

pub fn step_token_report(parts: &PromptParts, counter: &TokenCounter) -> Result<u64, CostError> {
    let text: u64 = parts.texts.iter().map(|t| counter.count(t)).sum();
    let mut images = 0;
    for &(w, h) in &parts.images {
        images += image_tokens(w, h)?;
    }
    Ok(text + images)
}

/// Whole micro-dollars, so ledger sums never drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct MicroUsd(pub u64);

impl MicroUsd {
    pub fn as_usd(self) -> f64 {
        self.0 as f64 / 1e6
    }
}

impl Add for MicroUsd {
    type Output = MicroUsd;
    fn add(self, rhs: MicroUsd) -> MicroUsd {
        MicroUsd(self.0 + rhs.0)
    }
}

impl FromStr for MicroUsd {
    type Err = CostError;

    /// Accepts plain decimals with at most six fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CostError::InvalidAmount(s.to_string());
        let t = s.trim().trim_start_matches('$');
        let (whole, frac) = t.split_once('.').unwrap_or((t, ""));
        if whole.is_empty() && frac.is_empty()
            || frac.len() > 6
            || !whole.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_micro: u64 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<6}").parse().map_err(|_| bad())?
        };
        whole
            .checked_mul(1_000_000)
            .and_then(|w| w.checked_add(frac_micro))
            .map(MicroUsd)
            .ok_or_else(bad)
    }
}

impl fmt::Display for MicroUsd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / 1_000_000, self.0 % 1_000_000)
    }
}

/// One row of a ledger CSV: `step_id,usd,success,tokens`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LedgerRow {
    pub step_id: String,
    pub usd: String,
    pub success: bool,
    pub tokens: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CostLedger {
    pub total: MicroUsd,
    pub steps: u64,
    pub successful_steps: u64,
    pub input_tokens_per_step: Vec<u64>,
}

impl CostLedger {
    pub fn record(&mut self, cost: MicroUsd, success: bool, tokens: u64) {
        self.total = self.total + cost;
        self.steps += 1;
        self.successful_steps += u64::from(success);
        self.input_tokens_per_step.push(tokens);
    }

    /// Associative merge; `a.merge(b).merge(c) == a.merge(b.merge(c))`.
    pub fn merge(mut self, other: CostLedger) -> CostLedger {
        self.total = self.total + other.total;
        self.steps += other.steps;
        self.successful_steps += other.successful_steps;
        self.input_tokens_per_step.extend(other.input_tokens_per_step);
        self
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<CostLedger, CostError> {
        let mut ledger = CostLedger::default();
        let mut rdr = csv::Reader::from_reader(reader);
        for row in rdr.deserialize::<LedgerRow>() {
            let row = row.map_err(|e| CostError::Ledger(e.to_string()))?;
            ledger.record(row.usd.parse()?, row.success, row.tokens);
        }
        Ok(ledger)
    }

    pub fn mean_input_tokens(&self) -> Option<f64> {
        if self.input_tokens_per_step.is_empty() {
            return None;
        }
        let sum: u64 = self.input_tokens_per_step.iter().sum();
        Some(sum as f64 / self.input_tokens_per_step.len() as f64)
    }
}

/// Total inference cost divided by the number of successful steps, at full precision.
pub fn usd_efficiency(ledger: &CostLedger) -> Result<f64, CostError> {
    if ledger.successful_steps == 0 {
        return Err(CostError::NoSuccessfulSteps);
    }
    Ok(ledger.total.as_usd() / ledger.successful_steps as f64)
}

/// Reporting precision for USD efficiency.
pub fn round3(value: f64) -> f64 {
    (value * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub steps: u64,
    pub successful_steps: u64,
    pub total_usd: String,
    pub usd_per_successful_step: Option<f64>,
    pub usd_efficiency: Option<String>,
    pub mean_input_tokens_per_step: Option<f64>,
}

impl CostReport {
    pub fn from_ledger(ledger: &CostLedger) -> Self {
        let eff = usd_efficiency(ledger).ok();
        CostReport {
            steps: ledger.steps,
            successful_steps: ledger.successful_steps,
            total_usd: ledger.total.to_string(),
            usd_per_successful_step: eff,
            usd_efficiency: eff.map(|v| format!("{:.3}", round3(v))),
            mean_input_tokens_per_step: ledger.mean_input_tokens(),
        }
    }
}
