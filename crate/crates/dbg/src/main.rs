fn main() {
    use fuzzylim::expr::parse;
    use fuzzylim::limit::*;
    use fuzzylim::fuzzy::*;
    use fuzzylim::eval::EvalMode;
    let e = parse("x^2 + x - 3").unwrap();
    let sing = FuzzyNumber::singleton(1.0, &AlphaGrid::default()).unwrap();
    let mut alt = LimitConfig::default();
    alt.h0 = 0.05; alt.ratio = 0.7;
    for side in [Side::Left, Side::Right] {
        let approach = ApproachSpec::point(sing.clone(), side);
        let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &alt).unwrap();
        match &r.outcome {
            Outcome::Converged(l) => println!("{side:?}: converged core {:?}", l.core()),
            other => println!("{side:?}: {:?} notes={:?}", other, r.notes),
        }
        let trace = &r.certificate.entries[0].residual_trace;
        println!("  residuals (first 40): {:?}", &trace[..trace.len().min(40)]);
    }
}
