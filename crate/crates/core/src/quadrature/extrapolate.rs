/// Neville polynomial extrapolation of `ys(xs)` to `x = 0`.
///
/// Returns the estimate that uses every sample and the absolute change from
/// the next-lower order, which serves as its error estimate. `xs` must be
/// distinct and nonzero; the samples closest to zero should come last.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len(), "abscissae and ordinates differ in length");
    let n = xs.len();
    match n {
        0 => return (f64::NAN, f64::INFINITY),
        1 => return (ys[0], f64::INFINITY),
        _ => {}
    }
    let mut table = ys.to_vec();
    // after pass m, table[i] interpolates samples i..=i+m
    let mut previous = table[n - 1];
    let mut current = previous;
    for m in 1..n {
        for i in 0..n - m {
            let (xa, xb) = (xs[i], xs[i + m]);
            table[i] = (xa * table[i + 1] - xb * table[i]) / (xa - xb);
        }
        previous = current;
        current = table[n - 1 - m];
    }
    (current, (current - previous).abs())
}
