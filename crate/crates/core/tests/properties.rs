//! Cross-module invariants: the analytic facts about the bound map, solver
//! agreement, the inversion round-trip, schedule behaviour, and generator
//! determinism, as property tests over the standard parameter grid and
//! proptest-sampled inputs.

use proptest::prelude::*;

use extquad::bounds::{
    self, closed_form_floor_excess, fixed_point_map, fixed_point_map_excess,
    is_admissible_extension, lipschitz_bound, map_derivative, min_inefficiency_excess,
    solve_rho_star_default, BoundParams,
};
use extquad::quadrature::{van_der_corput, PointSequence};
use extquad::rootfind::{self, Bracket, Monotonicity};
use extquad::schedule::{arithmetic_schedule, geometric_schedule, validate_schedule, Schedule};

const GRID_ALPHA: [f64; 6] = [1.1, 1.5, 2.0, 3.0, 5.0, 10.0];
const GRID_RATIO: [f64; 4] = [1.0, 0.5, 0.1, 0.01];

fn grid() -> impl Iterator<Item = BoundParams> {
    GRID_ALPHA.iter().flat_map(|&alpha| {
        GRID_RATIO
            .iter()
            .map(move |&ratio| BoundParams::from_ratio(alpha, ratio).unwrap())
    })
}

#[test]
fn map_sends_the_unit_window_into_itself() {
    for p in grid() {
        for i in 0..=100 {
            let rho = 1.0 + i as f64 / 100.0;
            let g = fixed_point_map(rho, p);
            assert!((1.0..2.0).contains(&g), "g({rho}) = {g} escaped [1,2)");
            let e = fixed_point_map_excess(rho - 1.0, p);
            assert!(e > 0.0 && e < 1.0, "excess {e} escaped (0,1)");
        }
    }
}

#[test]
fn derivative_is_positive_and_below_lipschitz_bound_on_grid() {
    for p in grid() {
        let lam = lipschitz_bound(p);
        assert!(lam < 1.0);
        for i in 0..=100 {
            let rho = 1.0 + i as f64 / 100.0;
            let d = map_derivative(rho, p);
            assert!(d > 0.0, "derivative must be positive at rho = {rho}");
            assert!(d <= lam * (1.0 + 1e-12), "g'({rho}) = {d} exceeds lambda = {lam}");
        }
    }
}

#[test]
fn floor_orders_below_solution_below_two() {
    // strict ordering is asserted in excess space, where it is
    // representable everywhere on the grid except (alpha=1.1, m/M=0.01):
    // there the true gap is ~1e-46, provably below one ulp of the excess
    // (the gap is about 0.5 * excess^2), so equality is the correct f64
    // rendering and is accepted only under that certificate.
    for p in grid() {
        let sol = solve_rho_star_default(p).unwrap();
        let floor = closed_form_floor_excess(p);
        let excess = sol.rho_star_excess;
        assert!(excess < 1.0, "rho* must stay below 2");
        if excess > floor {
            continue;
        }
        let gap_bound = 0.5 * floor * floor;
        let ulp = floor * f64::EPSILON;
        assert!(
            excess == floor && gap_bound < ulp,
            "floor {floor:e} not strictly below excess {excess:e} and gap {gap_bound:e} is representable (alpha={}, ratio={})",
            p.alpha(),
            p.ratio()
        );
    }
}

#[test]
fn solution_is_monotone_in_alpha_and_ratio() {
    for &ratio in &GRID_RATIO {
        let mut last = 0.0;
        for &alpha in &GRID_ALPHA {
            let sol = solve_rho_star_default(BoundParams::from_ratio(alpha, ratio).unwrap())
                .unwrap();
            assert!(
                sol.rho_star_excess >= last,
                "rho* must be nondecreasing in alpha (ratio {ratio})"
            );
            last = sol.rho_star_excess;
        }
    }
    for &alpha in &GRID_ALPHA {
        let mut last = 0.0;
        for &ratio in GRID_RATIO.iter().rev() {
            let sol = solve_rho_star_default(BoundParams::from_ratio(alpha, ratio).unwrap())
                .unwrap();
            assert!(
                sol.rho_star_excess >= last,
                "rho* must be nondecreasing in m/M (alpha {alpha})"
            );
            last = sol.rho_star_excess;
        }
        // the m/M = 1 curve dominates every other level pointwise
        let top = solve_rho_star_default(BoundParams::from_ratio(alpha, 1.0).unwrap()).unwrap();
        assert!(top.rho_star_excess >= last);
    }
}

#[test]
fn doubling_is_always_admissible_on_grid() {
    for p in grid() {
        assert!(is_admissible_extension(2.0, p).unwrap());
    }
}

#[test]
fn solvers_agree_and_iterate_monotonically_on_grid() {
    for p in grid() {
        let tol = 1e-12;
        let sol = bounds::solve_rho_star(p, tol).unwrap();
        assert!(sol.residual <= tol, "residual {:.3e}", sol.residual);

        // rerun both routes separately and compare
        let g = |e: f64| fixed_point_map_excess(e, p);
        let fp = rootfind::fixed_point_iterate(g, 0.0, 0.0, 1.0, tol, 200).unwrap();
        assert!(fp.converged);
        assert_eq!(fp.monotonicity, Monotonicity::Increasing, "iterates from 1 must increase");
        let h = |e: f64| g(e) - e;
        let br = rootfind::brent(h, &Bracket::new(h, 0.0, 1.0).unwrap(), tol, 100).unwrap();
        assert!(br.converged);
        assert!(
            (fp.x - br.x).abs() <= 10.0 * tol,
            "route disagreement {:.3e} at alpha={} ratio={}",
            (fp.x - br.x).abs(),
            p.alpha(),
            p.ratio()
        );
        assert!((sol.rho_star_excess - fp.x).abs() <= 10.0 * tol);
    }
}

#[test]
fn contraction_rate_is_observed_near_the_fixed_point() {
    // once within 0.1 of rho*, per-step error ratios should not exceed the
    // Lipschitz bound by more than a little slack
    for p in grid() {
        let sol = solve_rho_star_default(p).unwrap();
        let lam = lipschitz_bound(p);
        let mut x = 0.0f64;
        let mut prev_err: Option<f64> = None;
        for _ in 0..200 {
            x = fixed_point_map_excess(x, p);
            let err = (x - sol.rho_star_excess).abs();
            if err < 1e-13 {
                break;
            }
            if (x - sol.rho_star_excess).abs() < 0.1 {
                if let Some(pe) = prev_err {
                    if pe > 1e-12 {
                        let ratio = err / pe;
                        assert!(
                            ratio <= lam + 0.05,
                            "contraction ratio {ratio} above lambda {lam} + 0.05 (alpha={})",
                            p.alpha()
                        );
                    }
                }
                prev_err = Some(err);
            }
        }
    }
}

#[test]
fn inefficiency_round_trips_across_grid() {
    for p in grid() {
        let sol = solve_rho_star_default(p).unwrap();
        let inv = min_inefficiency_excess(sol.rho_star_excess, p.alpha()).unwrap();
        let rel = (inv * p.ratio() - 1.0).abs();
        assert!(
            rel < 1e-6,
            "round trip off by {rel:.3e} at alpha={} ratio={}",
            p.alpha(),
            p.ratio()
        );
    }
}

#[test]
fn arithmetic_schedules_eventually_violate() {
    // with alpha > 1 and m = M, ratios (k+1)/k fall below the closed-form
    // floor once k is large enough
    for &alpha in &[1.5, 2.0, 3.0] {
        let p = BoundParams::from_ratio(alpha, 1.0).unwrap();
        let s = arithmetic_schedule(10, 10, 40).unwrap();
        let report = validate_schedule(&s, p, 1e-9).unwrap();
        assert!(!report.admissible, "arithmetic schedule must fail for alpha {alpha}");
        assert!(!report.violations.is_empty());
    }
}

proptest! {
    #[test]
    fn prop_map_window_holds(alpha in 1.5f64..32.0, ratio in 0.01f64..=1.0, rho in 1.0f64..=2.0) {
        let p = BoundParams::from_ratio(alpha, ratio).unwrap();
        let g = fixed_point_map(rho, p);
        prop_assert!(g > 1.0 && g < 2.0);
    }

    #[test]
    fn prop_floor_below_solution(alpha in 1.5f64..32.0, ratio in 0.01f64..=1.0) {
        let p = BoundParams::from_ratio(alpha, ratio).unwrap();
        let sol = solve_rho_star_default(p).unwrap();
        prop_assert!(closed_form_floor_excess(p) < sol.rho_star_excess);
        prop_assert!(sol.rho_star_excess < 1.0);
    }

    #[test]
    fn prop_doubling_admissible(alpha in 1.01f64..64.0, ratio in 1e-6f64..=1.0) {
        let p = BoundParams::from_ratio(alpha, ratio).unwrap();
        prop_assert!(is_admissible_extension(2.0, p).unwrap());
    }

    #[test]
    fn prop_round_trip_inversion(alpha in 1.5f64..16.0, ratio in 0.05f64..=1.0) {
        let p = BoundParams::from_ratio(alpha, ratio).unwrap();
        let sol = solve_rho_star_default(p).unwrap();
        let inv = min_inefficiency_excess(sol.rho_star_excess, alpha).unwrap();
        prop_assert!((inv * ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn prop_brent_solves_cubics_quickly(root in 0.05f64..0.95, scale in 0.1f64..10.0) {
        // simple root inside the bracket; at tol 1e-12 Brent must converge
        // well within 100 iterations
        let f = move |x: f64| scale * (x - root) * (x * x + 1.0);
        let bracket = Bracket::new(f, 0.0, 1.0).unwrap();
        let r = rootfind::brent(f, &bracket, 1e-12, 100).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.iterations <= 100);
        prop_assert!((r.x - root).abs() < 1e-9);
    }

    #[test]
    fn prop_geometric_schedules_validate_when_built_from_solver(
        alpha in 1.5f64..8.0,
        ratio in 0.05f64..=1.0,
        n1 in 1u64..500,
    ) {
        let p = BoundParams::from_ratio(alpha, ratio).unwrap();
        let sol = solve_rho_star_default(p).unwrap();
        let s = geometric_schedule(n1, sol.rho_star.max(1.0 + 1e-9), 8).unwrap();
        let report = validate_schedule(&s, p, 1e-9).unwrap();
        prop_assert!(report.admissible, "violations: {:?}", report.violations);
    }

    #[test]
    fn prop_geometric_schedule_strictly_increases(
        n1 in 1u64..1000,
        rho in 1.000001f64..3.0,
        count in 1usize..20,
    ) {
        let s = geometric_schedule(n1, rho, count).unwrap();
        prop_assert_eq!(s.len(), count);
        prop_assert!(s.sizes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn prop_validation_is_invariant_to_integer_scaling(
        sizes in proptest::collection::vec(1u64..5000, 2..10),
        c in 1u64..1000,
    ) {
        let mut sorted = sizes;
        sorted.sort_unstable();
        sorted.dedup();
        prop_assume!(sorted.len() >= 2);
        let base = Schedule::new(sorted.clone()).unwrap();
        let scaled = Schedule::new(sorted.iter().map(|&n| n * c).collect()).unwrap();
        // exact integer ratios are preserved by scaling, hence identical
        // ratio lists and identical violations
        prop_assert_eq!(base.ratios(), scaled.ratios());
        let p = BoundParams::from_ratio(2.0, 1.0).unwrap();
        let a = validate_schedule(&base, p, 1e-9).unwrap();
        let b = validate_schedule(&scaled, p, 1e-9).unwrap();
        prop_assert_eq!(a.violations, b.violations);
    }

    #[test]
    fn prop_radical_inverse_in_unit_interval(index in 1u64..100_000, base in 2u32..50) {
        let x = van_der_corput(index, base).unwrap();
        prop_assert!((0.0..1.0).contains(&x));
        // deterministic
        prop_assert_eq!(x, van_der_corput(index, base).unwrap());
    }

    #[test]
    fn prop_scrambling_preserves_net_structure(seed in any::<u64>(), k in 1u32..=8) {
        // first 2^k points land in distinct level-k dyadic intervals
        let seq = PointSequence::scrambled_base2(seed);
        let n = 1u64 << k;
        let mut seen = vec![false; n as usize];
        for i in 1..=n {
            let cell = (seq.point(i)[0] * n as f64) as usize;
            prop_assert!(!seen[cell], "cell {} hit twice at k={}", cell, k);
            seen[cell] = true;
        }
    }

    #[test]
    fn prop_randomized_generators_are_seed_deterministic(seed in any::<u64>(), index in 1u64..10_000) {
        let a = PointSequence::scrambled_base2(seed).point(index)[0];
        let b = PointSequence::scrambled_base2(seed).point(index)[0];
        prop_assert_eq!(a, b);
        prop_assert!((0.0..1.0).contains(&a));
        let s = PointSequence::van_der_corput(2).unwrap().random_shift(seed).unwrap();
        let x = s.point(index)[0];
        prop_assert!((0.0..1.0).contains(&x));
        prop_assert_eq!(x, s.point(index)[0]);
    }
}
