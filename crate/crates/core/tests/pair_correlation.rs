use adele_core::spectral_stats::{pair_correlation, unfold};
use adele_core::zeta_zeros::zeros_cached;

#[test]
fn first_six_hundred_zeros_follow_gue() {
    let zeros = zeros_cached(960.0, None).unwrap();
    assert!(zeros.len() >= 600, "{}", zeros.len());
    let ux = unfold(&zeros.take(600).unwrap()).unwrap();
    let r = pair_correlation(&ux, 2.0, 20).unwrap();
    eprintln!("L2 = {}, log LR = {}", r.l2_deviation, r.log_likelihood_ratio);
    assert!(r.gue_preferred());
    assert!(r.l2_deviation < 0.15);
}
