use nlqm_core::gaussian::ExactScalar;
use nlqm_core::locality::{appendix_signal, appendix_signal_iterations};
use num_rational::BigRational;

#[test]
fn three_iterations_give_signal_32b() {
    let s = appendix_signal().unwrap();
    assert_eq!(s.raw.to_string(), "-32/3*pi*sqrt(3)");
    assert_eq!(s.normalization.to_string(), "1/3*pi*sqrt(3)");
    assert_eq!(s.ratio.to_string(), "-32");
    assert_eq!(s.coefficient, ExactScalar::from_int(32));
    assert_eq!(s.iterations, 3);
}

#[test]
fn fewer_iterations_give_no_signal() {
    for n in 0..3 {
        let s = appendix_signal_iterations(n).unwrap();
        assert_eq!(s.raw, ExactScalar::from_int(0), "n = {n}");
    }
}

#[test]
fn signal_is_linear_in_b() {
    let s = appendix_signal().unwrap();
    let b = BigRational::new(3.into(), 7.into());
    let two_b = &b * BigRational::from_integer(2.into());
    assert_eq!(s.at(&two_b), s.at(&b).scale(&BigRational::from_integer(2.into())));
    assert_eq!(s.at(&BigRational::from_integer(0.into())), ExactScalar::from_int(0));
    assert_eq!(s.at(&b).to_string(), "96/7");
}
