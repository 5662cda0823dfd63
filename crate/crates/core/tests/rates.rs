//! Rate-regime experiments: the harness should reproduce the textbook
//! Monte Carlo n^-1/2 RMS rate, the faster scrambled-net rate on smooth
//! integrands at dyadic sizes, the degradation off the dyadic schedule, and
//! the weighted block estimator's recovery of the fast rate.

use extquad::quadrature::{
    fit_rate, rms_profile, rms_sample_sizes, weighted_block_estimate, Integrand, KahanSum,
    PointSequence, ReplicatedSequence,
};

const SEED: u64 = 42;
const REPLICATES: u32 = 200;

fn suite_integrand(label: &str) -> Integrand {
    Integrand::suite()
        .into_iter()
        .find(|f| f.label() == label)
        .expect("suite label")
}

fn iid_factory() -> ReplicatedSequence {
    ReplicatedSequence::new(PointSequence::iid_uniform(1, 0).unwrap(), SEED).unwrap()
}

fn scrambled_factory() -> ReplicatedSequence {
    ReplicatedSequence::new(PointSequence::scrambled_base2(0), SEED).unwrap()
}

fn shifted_factory() -> ReplicatedSequence {
    ReplicatedSequence::new(
        PointSequence::van_der_corput(2).unwrap().random_shift(0).unwrap(),
        SEED,
    )
    .unwrap()
}

#[test]
fn rate_separation_between_iid_and_scrambled() {
    let ns = rms_sample_sizes();
    let f_linear = suite_integrand("x");
    let f_smooth = suite_integrand("x2");

    let iid = rms_profile(&iid_factory(), &f_linear, &ns, REPLICATES).unwrap();
    let iid_fit = fit_rate(&iid).unwrap();
    println!("iid slope on x: {:.4} (r^2 {:.4})", iid_fit.slope, iid_fit.r_squared);
    assert!(
        iid_fit.slope > -0.6 && iid_fit.slope < -0.4,
        "iid slope {} outside [-0.6, -0.4]",
        iid_fit.slope
    );

    let scr = rms_profile(&scrambled_factory(), &f_smooth, &ns, REPLICATES).unwrap();
    let scr_fit = fit_rate(&scr).unwrap();
    println!("scrambled slope on x2: {:.4} (r^2 {:.4})", scr_fit.slope, scr_fit.r_squared);
    assert!(
        scr_fit.slope <= -1.3,
        "scrambled slope {} should be at most -1.3",
        scr_fit.slope
    );
}

#[test]
fn shifted_vdc_beats_the_monte_carlo_rate_on_smooth_f() {
    let ns = rms_sample_sizes();
    let f = suite_integrand("x2");
    let profile = rms_profile(&shifted_factory(), &f, &ns, REPLICATES).unwrap();
    let fit = fit_rate(&profile).unwrap();
    println!("shifted vdc slope on x2: {:.4}", fit.slope);
    assert!(fit.slope < -0.9, "shifted vdc slope {}", fit.slope);
}

#[test]
fn off_schedule_sizes_degrade_the_scrambled_rate() {
    // RMS at n = 3 * 2^k / 2 should exceed the log-log interpolation of the
    // dyadic curve at that point: the fast rate lives on the dyadic
    // subsequence only
    let f = suite_integrand("x2");
    let factory = scrambled_factory();
    let k = 10u32;
    let n_lo = 1u64 << k; // 1024
    let n_off = 3 * (1u64 << k) / 2; // 1536
    let n_hi = 1u64 << (k + 1); // 2048
    let profile = rms_profile(&factory, &f, &[n_lo, n_off, n_hi], REPLICATES).unwrap();
    let rms_lo = profile.eta()[0];
    let rms_off = profile.eta()[1];
    let rms_hi = profile.eta()[2];
    let interpolated = (rms_lo * rms_hi).sqrt();
    let ratio = rms_off / interpolated;
    println!(
        "off-schedule ratio at k={k}: {ratio:.2} (rms {rms_off:.3e} vs interpolated {interpolated:.3e})"
    );
    assert!(ratio >= 1.5, "off-schedule ratio {ratio} below 1.5");
}

#[test]
fn weighted_blocks_recover_the_fast_rate() {
    // geometric blocks 1, 2, 4, ..., 2^(K-1) (total 2^K - 1), weights
    // proportional to n_j^2, over scrambled replicates
    let f = suite_integrand("x2");
    let factory = scrambled_factory();
    let mut totals = Vec::new();
    let mut rms = Vec::new();
    for cap in 6..=12u32 {
        let blocks: Vec<u64> = (0..cap).map(|j| 1u64 << j).collect();
        let total: u64 = blocks.iter().sum();
        let mut sq = KahanSum::default();
        for r in 0..REPLICATES {
            let seq = factory.replicate(r);
            let est = weighted_block_estimate(&seq, &f, &blocks, 2.0).unwrap();
            let err = est - f.true_mean();
            sq.add(err * err);
        }
        totals.push(total);
        rms.push((sq.value() / REPLICATES as f64).sqrt());
    }
    let profile = extquad::quadrature::ErrorProfile::new(totals, rms).unwrap();
    let fit = fit_rate(&profile).unwrap();
    println!("weighted block slope: {:.4}", fit.slope);
    assert!(fit.slope <= -1.3, "weighted block slope {}", fit.slope);
}
