use crate::error::{Error, Result};
use crate::geometry::{CostFunction, Word};

/// Default limit on the number of words a cut set may hold.
pub const DEFAULT_CUT_SET_CAP: usize = 1_000_000;

/// Comparison slack for a budget: `1e−9 · max(1, B)`.
pub fn budget_tolerance(budget: f64) -> f64 {
    1e-9 * budget.abs().max(1.0)
}

/// The words `j|l` with `c(j|l−1) ≤ B < c(j|l)`, in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSet {
    words: Vec<Word>,
    costs: Vec<f64>,
    budget: f64,
}

impl CutSet {
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// `c(w)` for each word, in the same order.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The unique word that is a prefix of the given digits, if the digits
    /// are long enough to contain one.
    pub fn prefix_of(&self, digits: &[u8]) -> Option<&Word> {
        let k = self.words.partition_point(|w| w.digits() <= digits);
        // the candidate is the largest word not exceeding `digits`
        k.checked_sub(1).map(|i| &self.words[i]).filter(|w| digits.starts_with(w.digits()))
    }
}

pub fn cut_set(cf: &CostFunction, budget: f64) -> Result<CutSet> {
    cut_set_with_cap(cf, budget, DEFAULT_CUT_SET_CAP)
}

/// Depth-first enumeration: a word is extended while its cost stays within
/// the budget and emitted as soon as one more symbol takes it over.
pub fn cut_set_with_cap(cf: &CostFunction, budget: f64, cap: usize) -> Result<CutSet> {
    let mut words = Vec::new();
    let mut costs = Vec::new();
    visit_cut_set(cf, budget, cap, |digits, cost| {
        words.push(Word::from_digits_unchecked(digits.to_vec()));
        costs.push(cost);
    })?;
    Ok(CutSet { words, costs, budget })
}

/// Calls `emit(digits, cost)` for every cut-set word in lexicographic order.
pub(crate) fn visit_cut_set<F: FnMut(&[u8], f64)>(cf: &CostFunction, budget: f64, cap: usize, mut emit: F) -> Result<usize> {
    if !budget.is_finite() || budget < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "budget must be finite and non-negative, got {budget}"
        )));
    }
    let eps = budget_tolerance(budget);
    let m = cf.alphabet() as u8;
    let mut digits: Vec<u8> = Vec::new();
    let mut costs: Vec<f64> = vec![0.0];
    let mut emitted = 0usize;
    // iterative DFS: `digits` is the current word, its last digit the branch
    digits.push(1);
    while let Some(&d) = digits.last() {
        let c = costs[costs.len() - 1] + cf.symbol(d);
        if c > budget + eps {
            if emitted == cap {
                return Err(Error::CutSetCap { cap, budget });
            }
            emit(&digits, c);
            emitted += 1;
            // next sibling, climbing while exhausted
            loop {
                match digits.last_mut() {
                    None => return Ok(emitted),
                    Some(x) if *x < m => {
                        *x += 1;
                        break;
                    }
                    Some(_) => {
                        digits.pop();
                        costs.pop();
                    }
                }
            }
        } else {
            costs.push(c);
            digits.push(1);
        }
    }
    Ok(emitted)
}
