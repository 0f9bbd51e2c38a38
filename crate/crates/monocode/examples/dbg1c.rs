use monocode::codecs::{decode, encode_auto, encode_fast, encode_individual, encode_large, encode_small};
use monocode::estimators::EmpiricalCounts;
use monocode::Error;
use rand::prelude::*;
use std::io::Write;
use std::time::{Duration, Instant};

fn log_uniform(rng: &mut StdRng, lo: u64, hi: u64) -> u64 {
    let a = (lo as f64).ln();
    let b = (hi as f64).ln();
    (rng.gen_range(a..=b).exp() as u64).clamp(lo, hi)
}

fn main() {
    let mut rng = StdRng::seed_from_u64(0xACCE97);
    let mut style_time = [Duration::ZERO; 8];
    let mut op_time = [Duration::ZERO; 5];
    for trial in 0..1000u64 {
        let n = log_uniform(&mut rng, 1, 1 << 12) as usize;
        let style = (trial % 8) as usize;
        let x: Vec<u64> = (0..n)
            .map(|_| match style {
                0 => 1,
                1 => { let k = 2 + (trial / 8) % 63; rng.gen_range(1..=k) }
                2 => { let p = rng.gen_range(0.15..0.85); let mut s = 1u64; while rng.gen_bool(1.0 - p) && s < 1 << 20 { s += 1; } s }
                3 => { let gamma = rng.gen_range(0.5..3.0); let u: f64 = rng.gen_range(1e-7..1.0); (u.powf(-1.0 / gamma) as u64).clamp(1, 1 << 20) }
                4 => { let k = 2 + (trial / 8) % 30; let u: f64 = rng.gen(); ((u.sqrt() * k as f64) as u64 + 1).min(k) }
                5 => rng.gen_range(1..=(n as u64).max(1)),
                6 => rng.gen_range(1..=10_000),
                _ => { if trial % 64 == 7 { rng.gen_range(1..=1 << 20) } else { rng.gen_range(1..=12) } }
            })
            .collect();
        let t_all = Instant::now();
        let counts = EmpiricalCounts::from_sequence(&x).unwrap();
        let k_max = counts.k_max();
        let t = Instant::now();
        match encode_small(&x, k_max) {
            Ok((b, _)) => assert_eq!(decode(&b).unwrap(), x),
            Err(Error::QuantizeInfeasible) => {}
            Err(e) => panic!("small {trial}: {e}"),
        }
        op_time[0] += t.elapsed();
        let t = Instant::now();
        match encode_large(&x) {
            Ok((b, _)) => assert_eq!(decode(&b).unwrap(), x),
            Err(Error::QuantizeInfeasible) => {}
            Err(e) => panic!("large {trial}: {e}"),
        }
        op_time[1] += t.elapsed();
        let t = Instant::now();
        let m = k_max.clamp(2, 64);
        let (b, _) = encode_fast(&x, m).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
        op_time[2] += t.elapsed();
        let t = Instant::now();
        let (b, _) = encode_individual(&x).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
        op_time[3] += t.elapsed();
        let t = Instant::now();
        let (b, _) = encode_auto(&x).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
        op_time[4] += t.elapsed();
        style_time[style] += t_all.elapsed();
    }
    eprintln!("style times: {style_time:?}");
    eprintln!("op times (small, large, fast, individual, auto): {op_time:?}");
    std::io::stderr().flush().unwrap();
}
