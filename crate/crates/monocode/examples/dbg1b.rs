use monocode::codecs::{decode, encode_auto, encode_fast, encode_individual, encode_large, encode_small};
use monocode::estimators::EmpiricalCounts;
use monocode::Error;
use rand::prelude::*;
use std::io::Write;
use std::time::Instant;

fn log_uniform(rng: &mut StdRng, lo: u64, hi: u64) -> u64 {
    let a = (lo as f64).ln();
    let b = (hi as f64).ln();
    (rng.gen_range(a..=b).exp() as u64).clamp(lo, hi)
}

fn main() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xACCE97);
    for trial in 0..10_000u64 {
        if trial % 250 == 0 {
            eprintln!("trial {trial} at {:?}", t0.elapsed());
            std::io::stderr().flush().unwrap();
        }
        let n = log_uniform(&mut rng, 1, 1 << 12) as usize;
        let style = trial % 8;
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
        let counts = EmpiricalCounts::from_sequence(&x).unwrap();
        let k_max = counts.k_max();
        match encode_small(&x, k_max) {
            Ok((b, _)) => assert_eq!(decode(&b).unwrap(), x),
            Err(Error::QuantizeInfeasible) => {}
            Err(e) => panic!("small {trial}: {e}"),
        }
        match encode_large(&x) {
            Ok((b, _)) => assert_eq!(decode(&b).unwrap(), x),
            Err(Error::QuantizeInfeasible) => {}
            Err(e) => panic!("large {trial}: {e}"),
        }
        let m = k_max.clamp(2, 64);
        let (b, _) = encode_fast(&x, m).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
        let (b, _) = encode_individual(&x).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
        let (b, _) = encode_auto(&x).unwrap();
        assert_eq!(decode(&b).unwrap(), x);
    }
    eprintln!("done {:?}", t0.elapsed());
}
