//! Classical placement optimizers over the sum-SE objective.
//!
//! Every optimizer talks to the objective through [`Objective`], which counts
//! evaluations so that methods can be compared at equal budgets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::placement::Placement;

/// Default cap on `N^L` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

/// A deterministic placement objective with an evaluation counter.
pub struct Objective<'a> {
    eval: Box<dyn Fn(&Placement) -> f64 + 'a>,
    evaluations: u64,
}

impl<'a> Objective<'a> {
    pub fn new(eval: impl Fn(&Placement) -> f64 + 'a) -> Self {
        Self {
            eval: Box::new(eval),
            evaluations: 0,
        }
    }

    /// Sum SE of `scenario`. Placements handed out by the optimizers are
    /// always in range, so evaluation cannot fail.
    pub fn sum_se(scenario: &'a Scenario) -> Self {
        Self::new(move |p| {
            scenario
                .sum_se(p)
                .expect("optimizer produced an out-of-range placement")
        })
    }

    pub fn evaluate(&mut self, placement: &Placement) -> f64 {
        self.evaluations += 1;
        (self.eval)(placement)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub best_placement: Placement,
    pub best_value: f64,
    pub evaluations: u64,
    /// `(evaluation index, best-so-far)` recorded at the first evaluation and
    /// at every strict improvement. Indices are 1-based.
    pub trace: Vec<(u64, f64)>,
}

/// Tracks the incumbent; replaces it only on strict improvement so the first
/// visited maximizer wins ties.
struct Incumbent {
    placement: Option<Placement>,
    value: f64,
    start: u64,
    trace: Vec<(u64, f64)>,
}

impl Incumbent {
    fn new(obj: &Objective<'_>) -> Self {
        Self {
            placement: None,
            value: f64::NEG_INFINITY,
            start: obj.evaluations(),
            trace: Vec::new(),
        }
    }

    fn offer(&mut self, obj: &mut Objective<'_>, candidate: &Placement) -> f64 {
        let value = obj.evaluate(candidate);
        if self.placement.is_none() || value > self.value {
            self.value = value;
            self.placement = Some(candidate.clone());
            self.trace.push((obj.evaluations() - self.start, value));
        }
        value
    }

    fn finish(self, obj: &Objective<'_>) -> OptimizerResult {
        OptimizerResult {
            best_placement: self.placement.expect("at least one evaluation"),
            best_value: self.value,
            evaluations: obj.evaluations() - self.start,
            trace: self.trace,
        }
    }
}

/// Size of the search space `N^L` as a float (it overflows integers quickly).
pub fn search_space_size(num_aps: usize, num_positions: usize) -> f64 {
    (num_positions as f64).powi(num_aps as i32)
}

/// Global maximizer by enumerating all `N^L` placements in lexicographic order.
pub fn exhaustive_search(
    obj: &mut Objective<'_>,
    num_aps: usize,
    num_positions: usize,
    budget_cap: u64,
) -> Result<OptimizerResult> {
    check_dims(num_aps, num_positions)?;
    let space = search_space_size(num_aps, num_positions);
    if space > budget_cap as f64 {
        return Err(Error::BudgetExceeded {
            space,
            cap: budget_cap,
        });
    }
    let mut incumbent = Incumbent::new(obj);
    let mut current = Placement::ones(num_aps);
    loop {
        incumbent.offer(obj, &current);
        // Odometer increment, last AP fastest.
        let mut ap = num_aps;
        loop {
            if ap == 0 {
                return Ok(incumbent.finish(obj));
            }
            ap -= 1;
            let next = current.positions()[ap] + 1;
            if next <= num_positions {
                current.set(ap, next);
                break;
            }
            current.set(ap, 1);
        }
    }
}

/// Best of `budget` i.i.d. uniform placements.
pub fn random_search(
    obj: &mut Objective<'_>,
    num_aps: usize,
    num_positions: usize,
    budget: u64,
    seed: u64,
) -> Result<OptimizerResult> {
    check_dims(num_aps, num_positions)?;
    if budget == 0 {
        return Err(Error::InvalidConfig("random search budget must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut incumbent = Incumbent::new(obj);
    let mut candidate = Placement::ones(num_aps);
    for _ in 0..budget {
        for ap in 0..num_aps {
            candidate.set(ap, rng.random_range(1..=num_positions));
        }
        incumbent.offer(obj, &candidate);
    }
    Ok(incumbent.finish(obj))
}

/// Cyclic coordinate ascent from the all-ones placement.
///
/// Each pass visits APs in order and moves each to the best of its `N`
/// positions with the others held fixed (ties to the smallest index). Stops
/// after a pass with no change or after `max_passes`.
pub fn greedy_coordinate_ascent(
    obj: &mut Objective<'_>,
    num_aps: usize,
    num_positions: usize,
    max_passes: usize,
) -> Result<OptimizerResult> {
    check_dims(num_aps, num_positions)?;
    if max_passes == 0 {
        return Err(Error::InvalidConfig("greedy max_passes must be >= 1".into()));
    }
    let mut incumbent = Incumbent::new(obj);
    let mut current = Placement::ones(num_aps);
    for _ in 0..max_passes {
        let mut changed = false;
        for ap in 0..num_aps {
            let original = current.positions()[ap];
            let mut best = (original, f64::NEG_INFINITY);
            for n in 1..=num_positions {
                current.set(ap, n);
                let value = incumbent.offer(obj, &current);
                if value > best.1 {
                    best = (n, value);
                }
            }
            current.set(ap, best.0);
            changed |= best.0 != original;
        }
        if !changed {
            break;
        }
    }
    let mut result = incumbent.finish(obj);
    // Every coordinate move keeps the current value at the running maximum, so
    // the final state attains `best_value`; with ties it may differ from the
    // first maximizer visited.
    result.best_placement = current;
    Ok(result)
}

/// The fixed-position baseline: every antenna at position 1.
pub fn fixed_baseline(obj: &mut Objective<'_>, num_aps: usize) -> Result<OptimizerResult> {
    if num_aps == 0 {
        return Err(Error::InvalidConfig("num_aps must be positive".into()));
    }
    let mut incumbent = Incumbent::new(obj);
    incumbent.offer(obj, &Placement::ones(num_aps));
    Ok(incumbent.finish(obj))
}

fn check_dims(num_aps: usize, num_positions: usize) -> Result<()> {
    if num_aps == 0 || num_positions == 0 {
        return Err(Error::InvalidConfig(
            "num_aps and num_positions must be positive".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_objective(values: Vec<f64>, num_positions: usize) -> Objective<'static> {
        Objective::new(move |p: &Placement| {
            let idx = p
                .positions()
                .iter()
                .fold(0, |acc, &n| acc * num_positions + (n - 1));
            values[idx]
        })
    }

    #[test]
    fn singleton_space() {
        let mut obj = table_objective(vec![3.0], 1);
        let r = exhaustive_search(&mut obj, 1, 1, 10).unwrap();
        assert_eq!(r.best_placement, Placement::ones(1));
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn exhaustive_budget_exceeded() {
        let mut obj = table_objective(vec![], 10);
        let err = exhaustive_search(&mut obj, 10, 10, DEFAULT_EXHAUSTIVE_CAP).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert_eq!(obj.evaluations(), 0);
    }

    #[test]
    fn exhaustive_breaks_ties_lexicographically() {
        // [1,1]=0 [1,2]=5 [2,1]=5 [2,2]=1
        let mut obj = table_objective(vec![0.0, 5.0, 5.0, 1.0], 2);
        let r = exhaustive_search(&mut obj, 2, 2, 100).unwrap();
        assert_eq!(r.best_placement.positions(), &[1, 2]);
        assert_eq!(r.evaluations, 4);
        assert_eq!(r.trace, vec![(1, 0.0), (2, 5.0)]);
    }

    #[test]
    fn random_single_draw() {
        let mut obj = table_objective((0..9).map(f64::from).collect(), 3);
        let r = random_search(&mut obj, 2, 3, 1, 7).unwrap();
        assert_eq!(r.evaluations, 1);
        let mut check = table_objective((0..9).map(f64::from).collect(), 3);
        assert_eq!(check.evaluate(&r.best_placement), r.best_value);
    }

    #[test]
    fn random_is_seeded() {
        let values: Vec<f64> = (0..27).map(|i| ((i * 7) % 11) as f64).collect();
        let mut a = table_objective(values.clone(), 3);
        let mut b = table_objective(values, 3);
        assert_eq!(
            random_search(&mut a, 3, 3, 27, 42).unwrap(),
            random_search(&mut b, 3, 3, 27, 42).unwrap()
        );
    }

    #[test]
    fn greedy_single_coordinate() {
        let mut obj = table_objective(vec![1.0, 4.0, 2.0, 4.0], 4);
        let r = greedy_coordinate_ascent(&mut obj, 1, 4, 1).unwrap();
        assert_eq!(r.best_placement.positions(), &[2]);
        assert_eq!(r.best_value, 4.0);
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn greedy_flat_objective_stays_home() {
        let mut obj = Objective::new(|_| 1.0);
        let r = greedy_coordinate_ascent(&mut obj, 3, 4, 5).unwrap();
        assert_eq!(r.best_placement, Placement::ones(3));
        assert_eq!(r.evaluations, 12);
    }

    #[test]
    fn greedy_rejects_zero_passes() {
        let mut obj = Objective::new(|_| 1.0);
        assert!(greedy_coordinate_ascent(&mut obj, 3, 4, 0).is_err());
    }

    #[test]
    fn fixed_baseline_is_one_evaluation() {
        let mut obj = Objective::new(|p: &Placement| p.positions().iter().sum::<usize>() as f64);
        let r = fixed_baseline(&mut obj, 5).unwrap();
        assert_eq!(r.best_placement, Placement::ones(5));
        assert_eq!((r.best_value, r.evaluations), (5.0, 1));
    }
}
