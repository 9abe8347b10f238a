use num_rational::BigRational;
use skewlab::cfrac::synthesize_alpha_pair;
use skewlab::dimension::*;
use skewlab::rigorous::rat;

#[test]
fn depth_three_certificate() {
    let alpha = synthesize_alpha_pair(3, None).unwrap();
    let t = std::time::Instant::now();
    let sched = BlockSchedule::build(&alpha, &rat(13, 5), &rat(3, 1), 2).unwrap();
    let bound = certify_dimension_bound(&sched, &rat(1, 64)).unwrap();
    for rb in &bound.regimes {
        eprintln!("{} s={:?}", rb.regime, rb.s.as_ref().map(|s| s.to_string()));
        assert!(rb.s.as_ref().unwrap() < &rat(2, 1));
    }
    let overall = bound.overall.clone().unwrap();
    assert!(overall < rat(2, 1));
    assert_eq!(bound.product.unwrap(), overall + BigRational::from_integer(1.into()));
    eprintln!("elapsed {:?}", t.elapsed());
}
