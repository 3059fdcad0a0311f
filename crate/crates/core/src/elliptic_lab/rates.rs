/// Least-squares slope of `log error` against `log h`: the observed order `p`
/// in `error ≈ C·h^p`. Requires at least two positive errors.
pub fn empirical_order(hs: &[f64], errors: &[f64]) -> Option<f64> {
    if hs.len() != errors.len() || hs.len() < 2 {
        return None;
    }
    if hs
        .iter()
        .chain(errors)
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return None;
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Orders between consecutive grids, `log(e_k/e_{k+1}) / log(h_k/h_{k+1})`.
pub fn pairwise_orders(hs: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    hs.windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| empirical_order(h, e))
        .collect()
}
