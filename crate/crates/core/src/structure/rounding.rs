use crate::rational::Rational;

use super::StructureError;

/// Result of rounding a multiset of subtour demands into `1/beta` groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rounded {
    /// Sorted groups after zero padding at the front; empty when no rounding happened.
    pub groups: Vec<Vec<Rational>>,
    pub padding: usize,
    /// `(rounded value, original value of the slot it takes)` for every slot
    /// of groups `2..`. Identity pairs when no rounding happened.
    pub slots: Vec<(Rational, Rational)>,
    pub discarded: Vec<Rational>,
}

impl Rounded {
    pub fn rounded(&self) -> Vec<Rational> {
        self.slots.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn maxima(&self) -> Vec<Rational> {
        self.groups
            .iter()
            .map(|g| g.last().cloned().unwrap_or_else(Rational::zero))
            .collect()
    }
}

pub fn adaptive_round(demands: &[Rational], beta: &Rational) -> Result<Rounded, StructureError> {
    let inv = if beta.is_positive() {
        beta.recip()
    } else {
        return Err(StructureError::BadBeta(beta.clone()));
    };
    let m = match inv.to_u64() {
        Some(m) if inv.is_integer() && m >= 1 => m as usize,
        _ => return Err(StructureError::BadBeta(beta.clone())),
    };
    if demands.len() <= m {
        return Ok(Rounded {
            groups: Vec::new(),
            padding: 0,
            slots: demands.iter().map(|d| (d.clone(), d.clone())).collect(),
            discarded: Vec::new(),
        });
    }
    let size = demands.len().div_ceil(m);
    let padding = size * m - demands.len();
    let mut sorted = vec![Rational::zero(); padding];
    let mut rest = demands.to_vec();
    rest.sort();
    sorted.extend(rest);
    let groups: Vec<Vec<Rational>> = sorted.chunks(size).map(|c| c.to_vec()).collect();
    let mut slots = Vec::new();
    for i in 1..m {
        let max = groups[i - 1].last().expect("nonempty group").clone();
        for orig in &groups[i] {
            slots.push((max.clone(), orig.clone()));
        }
    }
    let discarded = groups[m - 1].clone();
    Ok(Rounded {
        groups,
        padding,
        slots,
        discarded,
    })
}
