//! Closed-form strategies and where their values cross.

use rendezvous::certify::{crossover, difference_numerator, eval_closed_form, ClosedFormName};
use rendezvous::rational::Rational;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn main() {
    for name in ClosedFormName::ALL {
        let e = eval_closed_form(name, &q("1")).unwrap();
        let times: Vec<String> = e.times.iter().map(|t| t.to_string()).collect();
        let z = e.z.map_or("-".to_string(), |z| z.to_string());
        println!("{:<12} v=1  z={z:<4} times {:<18} sum {}", name.as_str(), times.join(","), e.sum);
    }

    let (lo, hi) = crossover(ClosedFormName::ExactLt, ClosedFormName::ExactGt, (&q("1/2"), &q("7/10")), &q("1/1000000000000")).unwrap();
    println!("exact_lt = exact_gt in [{}, {}]", lo.to_decimal_digits(15), hi.to_decimal_digits(15));

    let (lo, hi) =
        crossover(ClosedFormName::ExactGt, ClosedFormName::MarkerFast, (&q("7/10"), &q("9/10")), &q("1/1000")).unwrap();
    println!("exact_gt = marker_fast in [{}, {}]", lo.to_decimal(), hi.to_decimal());
    println!("difference numerator {:?}", difference_numerator(ClosedFormName::ExactGt, ClosedFormName::MarkerFast).coeffs());
}
