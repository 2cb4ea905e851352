use std::io::Write;

use crate::domain::ObjectiveSense;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,played,comparator,cum_regret";

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub t: usize,
    pub played: f64,
    pub comparator: f64,
    pub cum_regret: f64,
}

/// Running α-regret: `α·Σ comparator − Σ played` when maximizing,
/// `Σ played − Σ comparator` when minimizing.
#[derive(Clone, Debug)]
pub struct RegretLedger {
    sense: ObjectiveSense,
    alpha: f64,
    rows: Vec<LedgerRow>,
    played_sum: f64,
    comparator_sum: f64,
}

impl RegretLedger {
    pub fn new(sense: ObjectiveSense, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("α = {alpha} is outside (0, 1]")));
        }
        Ok(RegretLedger {
            sense,
            alpha,
            rows: Vec::new(),
            played_sum: 0.0,
            comparator_sum: 0.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Appends a round and returns the cumulative regret.
    pub fn record_round(&mut self, played: f64, comparator: f64) -> f64 {
        self.played_sum += played;
        self.comparator_sum += comparator;
        let cum_regret = self.regret();
        self.rows.push(LedgerRow {
            t: self.rows.len() + 1,
            played,
            comparator,
            cum_regret,
        });
        cum_regret
    }

    pub fn regret(&self) -> f64 {
        match self.sense {
            ObjectiveSense::MaximizeDRSubmodular => {
                self.alpha * self.comparator_sum - self.played_sum
            }
            ObjectiveSense::MinimizeConvex => self.played_sum - self.comparator_sum,
        }
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(CSV_HEADER.split(',')).map_err(to_io)?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.played.to_string(),
                r.comparator.to_string(),
                r.cum_regret.to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Invariant(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::ONE_MINUS_INV_E;

    #[test]
    fn matching_comparator_has_zero_regret() {
        let mut l = RegretLedger::new(ObjectiveSense::MaximizeDRSubmodular, 1.0).unwrap();
        for v in [1.0, 2.5, 0.25] {
            l.record_round(v, v);
        }
        assert_eq!(l.regret(), 0.0);
    }

    #[test]
    fn alpha_regret_can_be_negative() {
        let mut l = RegretLedger::new(ObjectiveSense::MaximizeDRSubmodular, ONE_MINUS_INV_E).unwrap();
        let r = l.record_round(7.0, 10.0);
        let expected = ONE_MINUS_INV_E * 10.0 - 7.0;
        assert!((r - expected).abs() < 1e-15);
        assert!((r - -0.678794).abs() < 1e-5);
    }

    #[test]
    fn minimization_flips_sign() {
        let mut l = RegretLedger::new(ObjectiveSense::MinimizeConvex, 1.0).unwrap();
        assert_eq!(l.record_round(3.0, 1.0), 2.0);
        assert_eq!(l.record_round(1.0, 2.0), 1.0);
    }

    #[test]
    fn csv_schema() {
        let mut l = RegretLedger::new(ObjectiveSense::MinimizeConvex, 1.0).unwrap();
        l.record_round(0.5, 0.25);
        let s = l.to_csv_string().unwrap();
        assert_eq!(s, "t,played,comparator,cum_regret\n1,0.5,0.25,0.25\n");
    }

    #[test]
    fn alpha_validated() {
        assert!(RegretLedger::new(ObjectiveSense::MinimizeConvex, 0.0).is_err());
        assert!(RegretLedger::new(ObjectiveSense::MinimizeConvex, 1.5).is_err());
    }
}
