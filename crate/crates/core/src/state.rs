//! Binary system states and masked synaptic weight vectors.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Spike pattern of a whole system at one tic. Every entry is 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateVector {
    bits: Vec<u8>,
}

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Build from explicit 0/1 entries; any other value is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("state entry {b} is not a bit")));
        }
        Ok(Self { bits: bits.to_vec() })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            bits: bits.iter().map(|&b| b as u8).collect(),
        }
    }

    /// State of length `len` with ones exactly at `active`.
    pub fn from_active(len: usize, active: &[usize]) -> Result<Self> {
        let mut bits = vec![0; len];
        for &i in active {
            if i >= len {
                return Err(Error::Dimension { expected: len, got: i + 1 });
            }
            bits[i] = 1;
        }
        Ok(Self { bits })
    }

    /// Enumerates `{0,1}^n` in binary counting order (bit 0 is the lowest).
    pub fn enumerate(n: usize) -> impl Iterator<Item = StateVector> {
        (0u64..(1u64 << n)).map(move |code| StateVector {
            bits: (0..n).map(|i| ((code >> i) & 1) as u8).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.bits[i] = on as u8;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Cospiking indicator of entries `i` and `j`.
    pub fn cospike(&self, i: usize, j: usize) -> bool {
        self.get(i) && self.get(j)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }
}

/// Synaptic weights of one neuron over the whole system, together with the
/// mask of synapses that physically exist. Entries outside the mask are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    mask: Vec<bool>,
}

impl WeightVector {
    /// Every synapse exists.
    pub fn dense(weights: Vec<f64>) -> Self {
        let mask = vec![true; weights.len()];
        Self { weights, mask }
    }

    /// Projects `weights` onto `mask`: entries without a synapse become 0.
    pub fn masked(mut weights: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        check_len(weights.len(), mask.len())?;
        for (w, &m) in weights.iter_mut().zip(&mask) {
            if !m {
                *w = 0.0;
            }
        }
        Ok(Self { weights, mask })
    }

    pub fn zeros(len: usize) -> Self {
        Self::dense(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Sets an active synapse. Writes to absent synapses are dropped.
    pub fn set(&mut self, i: usize, value: f64) {
        if self.mask[i] {
            self.weights[i] = value;
        }
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn active_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Input current `<w, x>`.
    pub fn dot(&self, x: &StateVector) -> Result<f64> {
        check_len(self.len(), x.len())?;
        Ok(x.active().map(|i| self.weights[i]).sum())
    }

    /// Whether the two masks share no synapse.
    pub fn disjoint_from(&self, other: &WeightVector) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_entries() {
        assert!(StateVector::from_bits(&[0, 1, 2]).is_err());
        assert_eq!(StateVector::from_bits(&[1, 0, 1]).unwrap().count_ones(), 2);
    }

    #[test]
    fn mask_projects_to_zero() {
        let w = WeightVector::masked(vec![0.3, 0.7, 0.9], vec![true, false, true]).unwrap();
        assert_eq!(w.as_slice(), &[0.3, 0.0, 0.9]);
        let x = StateVector::from_bits(&[1, 1, 0]).unwrap();
        assert_eq!(w.dot(&x).unwrap(), 0.3);
    }

    #[test]
    fn enumerate_covers_cube() {
        let all: Vec<_> = StateVector::enumerate(3).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[5].bits(), &[1, 0, 1]);
    }

    #[test]
    fn dot_rejects_mismatch() {
        let w = WeightVector::zeros(2);
        let x = StateVector::zeros(3);
        assert!(matches!(w.dot(&x), Err(Error::Dimension { .. })));
    }
}
