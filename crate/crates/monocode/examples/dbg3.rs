fn loglik(counts: &[u64], theta: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&c, &t) in counts.iter().zip(theta) {
        if c > 0 {
            if t <= 0.0 { return f64::NEG_INFINITY; }
            s += c as f64 * t.log2();
        }
    }
    s
}

fn search(
    counts: &[u64], center: Option<&[f64]>, step: f64, span: i32,
    prefix: &mut Vec<f64>, used: f64, best: &mut (f64, Vec<f64>),
) {
    let k = counts.len();
    let i = prefix.len();
    if i == k - 1 {
        let rest = 1.0 - used;
        let cap = prefix.last().copied().unwrap_or(1.0);
        if rest >= -1e-12 && rest <= cap + 1e-12 {
            prefix.push(rest.max(0.0));
            let v = loglik(counts, prefix);
            if v > best.0 { *best = (v, prefix.clone()); }
            prefix.pop();
        }
        return;
    }
    let prev = prefix.last().copied().unwrap_or(1.0);
    let remaining = (k - i) as f64;
    let (lo, hi) = match center {
        None => ((1.0 - used) / remaining - step, prev.min(1.0 - used)),
        Some(c) => (c[i] - span as f64 * step, (c[i] + span as f64 * step).min(prev)),
    };
    let mut t = lo.max(0.0);
    while t <= hi + 1e-12 {
        let tc = t.clamp(0.0, prev.min(1.0 - used).max(0.0));
        prefix.push(tc);
        search(counts, center, step, span, prefix, used + tc, best);
        prefix.pop();
        t += step;
    }
}

fn main() {
    let counts = [3u64, 0, 0, 4];
    let mut best = (f64::NEG_INFINITY, vec![]);
    let mut step = 1e-2;
    search(&counts, None, step, 0, &mut Vec::new(), 0.0, &mut best);
    println!("coarse: {:.12}  {:?}", best.0, best.1);
    while step > 1e-11 {
        step /= 10.0;
        let center = best.1.clone();
        let mut refined = best.clone();
        search(&counts, Some(&center), step, 12, &mut Vec::new(), 0.0, &mut refined);
        best = refined;
        println!("step {step:.0e}: {:.12}  {:?}", best.0, best.1);
    }
    // true optimum 3/7, 4/21 x3
    let opt = [3.0/7.0, 4.0/21.0, 4.0/21.0, 4.0/21.0];
    println!("true:   {:.12}  {:?}", loglik(&counts, &opt), opt);
}
