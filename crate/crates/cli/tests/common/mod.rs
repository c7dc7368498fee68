#![allow(dead_code)]

use clap::Parser;
use coherent_cli::{execute, Cli, CliError, Emitted};
use coherent_core::{poly, TransferFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn run(args: &[&str]) -> Result<Vec<Emitted>, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("coherent").chain(args.iter().copied())).expect("valid flags");
    execute(&cli.command)
}

/// Header and rows of the emitted table called `name`.
pub fn table(out: &[Emitted], name: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let e = out
        .iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("no table {name}"));
    let mut reader = csv::Reader::from_reader(e.contents.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

pub fn f(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Stable, strictly proper plant of order 1..=max_order with real and
/// complex poles and a DC gain bounded away from zero.
pub fn random_plant(rng: &mut ChaCha8Rng, max_order: usize) -> TransferFunction {
    let order = rng.random_range(1..=max_order);
    let mut den = vec![1.0];
    let mut n = 0;
    while n < order {
        let a = rng.random_range(0.3..4.0);
        if n + 2 <= order && rng.random_bool(0.5) {
            let b: f64 = rng.random_range(0.2..3.0);
            den = poly::mul(&den, &[1.0, 2.0 * a, a * a + b * b]);
            n += 2;
        } else {
            den = poly::mul(&den, &[1.0, a]);
            n += 1;
        }
    }
    let mut num: Vec<f64> = (0..order).map(|_| rng.random_range(-2.0..2.0)).collect();
    num[0] = rng.random_range(0.5..2.0f64).copysign(num[0]);
    let last = order - 1;
    if num[last].abs() < 0.2 {
        num[last] = 0.2f64.copysign(num[last]);
    }
    TransferFunction::new(num, den).unwrap()
}
