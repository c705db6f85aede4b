use crate::error::{Error, Result};

/// Splits `0..n` into `i` groups for coefficients `a` sorted
/// nonincreasingly and strictly positive, `1 <= i < n`.
///
/// With `σ² = Σ_{k>i} a_k²`, the tail `i+1..n` (1-based) is cut greedily
/// into consecutive runs whose squares sum to at most `σ²/i`; run `l`
/// joins the head element `l` and the last group absorbs whatever is
/// left. Indices are 0-based, so group `l` always contains `l`.
pub fn group_indices(a: &[f64], i: usize) -> Result<Vec<Vec<usize>>> {
    let n = a.len();
    if i < 1 || i >= n {
        return Err(Error::InvalidArgument(format!(
            "grouping needs 1 <= i < n, got i = {i}, n = {n}"
        )));
    }
    if a.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("coefficients must be nonincreasing".into()));
    }
    if !(a[n - 1] > 0.0) {
        return Err(Error::InvalidArgument("coefficients must be positive".into()));
    }
    let sigma2: f64 = a[i..].iter().map(|x| x * x).sum();
    let bound = sigma2 / i as f64;
    let mut groups = Vec::with_capacity(i);
    let mut start = i;
    for l in 0..i - 1 {
        let mut end = start;
        let mut run = 0.0;
        while end < n && run + a[end] * a[end] <= bound {
            run += a[end] * a[end];
            end += 1;
        }
        let mut g = vec![l];
        g.extend(start..end);
        groups.push(g);
        start = end;
    }
    let mut last = vec![i - 1];
    last.extend(start..n);
    groups.push(last);
    Ok(groups)
}
