use serde::{Deserialize, Serialize};

/// Engagement statistics of one run, counted after the warmup.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub percent_correct: f64,
    pub correct_per_1000_tics: f64,
    pub correct: u64,
    pub wrong: u64,
    pub measured_tics: u64,
    pub correct_by_area: Vec<u64>,
    pub wrong_by_area: Vec<u64>,
}

impl Metrics {
    pub fn new(areas: usize) -> Self {
        Self {
            correct_by_area: vec![0; areas],
            wrong_by_area: vec![0; areas],
            ..Self::default()
        }
    }

    pub fn record(&mut self, area: usize, correct: bool) {
        if correct {
            self.correct += 1;
            self.correct_by_area[area] += 1;
        } else {
            self.wrong += 1;
            self.wrong_by_area[area] += 1;
        }
    }

    pub fn tick(&mut self) {
        self.measured_tics += 1;
    }

    pub fn events(&self) -> u64 {
        self.correct + self.wrong
    }

    /// Recomputes the derived rates. No events gives 0% correct.
    pub fn finalize(&mut self) {
        let events = self.events();
        self.percent_correct = if events == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / events as f64
        };
        self.correct_per_1000_tics = if self.measured_tics == 0 {
            0.0
        } else {
            1000.0 * self.correct as f64 / self.measured_tics as f64
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates() {
        let mut m = Metrics::new(2);
        for _ in 0..2000 {
            m.tick();
        }
        m.record(0, true);
        m.record(0, true);
        m.record(1, true);
        m.record(1, false);
        m.finalize();
        assert_eq!(m.percent_correct, 75.0);
        assert_eq!(m.correct_per_1000_tics, 1.5);
        assert_eq!(m.correct_by_area, vec![2, 1]);
        let mut empty = Metrics::new(8);
        empty.finalize();
        assert_eq!(empty.percent_correct, 0.0);
    }
}
