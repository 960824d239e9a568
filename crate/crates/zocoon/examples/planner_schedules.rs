//! Parameter planning: turn `(budget, target radius, L, p, d)` into a full
//! solver schedule and evaluate the attainable stationarity bounds.
//!
//! ```text
//! cargo run --release --example planner_schedules
//! ```

use zocoon::solver::{
    expected_bound, highprob_bound, oracle_complexity_estimate, plan_expectation, plan_highprob,
};

fn main() -> zocoon::Result<()> {
    let (budget, delta, delta_bound, lipschitz, d) = (1_000_000u64, 0.1, 1.0, 1.0, 10);

    println!("in-expectation schedules at M = {budget}, delta = {delta}:");
    for p in [2.0, 1.5, 1.2] {
        let cfg = plan_expectation(budget, delta, delta_bound, lipschitz, p, d)?;
        println!(
            "  p = {p}: T = {}, K = {}, D = {:.3e}, tau = {:.2}, eta = {:.3e}, delta' = {}",
            cfg.rounds(),
            cfg.restarts(),
            cfg.domain_radius(),
            cfg.clip_threshold(),
            cfg.step_size(),
            cfg.smoothing_radius()
        );
        // Schedule identities: eta * tau = D and 2 T D = delta.
        assert!((cfg.step_size() * cfg.clip_threshold() - cfg.domain_radius()).abs() < 1e-18);
        println!(
            "         expected stationarity bound: {:.4}",
            expected_bound(budget, delta, delta_bound, lipschitz, p, d)
        );
    }

    let q = 0.1;
    let cfg = plan_highprob(budget, delta, delta_bound, lipschitz, 2.0, d, q)?;
    println!(
        "high-probability schedule (q = {q}): T = {}, K = {}, tau = {:.2}",
        cfg.rounds(),
        cfg.restarts(),
        cfg.clip_threshold()
    );
    println!(
        "  bound holding with probability 1-q: {:.4}",
        highprob_bound(budget, delta, delta_bound, lipschitz, 2.0, d, q)?
    );

    println!("oracle-call budgets needed for a target accuracy (p = 2):");
    for eps in [0.5, 0.25, 0.125] {
        let m = oracle_complexity_estimate(delta, eps, delta_bound, lipschitz, 2.0, d)?;
        println!("  eps = {eps}: M = {m} iterations ({} oracle calls)", 2 * m);
    }
    Ok(())
}
