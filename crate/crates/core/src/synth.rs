//! Seeded synthetic data for tests, benchmarks and smoke runs.

use crate::data::Dataset;
use crate::nn::{Matrix, Rng};

/// Two well-separated Gaussian-ish blobs in `[0, 1]^dims`: positives
/// centred at 0.75, negatives at 0.25, per-coordinate noise ±`spread`.
pub fn separable_blobs(n: usize, positive_fraction: f64, dims: usize, spread: f64, seed: u64) -> Dataset {
    let mut rng = Rng::new(seed);
    let positives = (n as f64 * positive_fraction).round() as usize;
    let mut data = Vec::with_capacity(n * dims);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i < positives { 1.0 } else { 0.0 };
        let centre = if y == 1.0 { 0.75 } else { 0.25 };
        for _ in 0..dims {
            data.push((centre + rng.uniform(-spread, spread)).clamp(0.0, 1.0));
        }
        labels.push(y);
    }
    let names = (0..dims).map(|j| format!("x{j}")).collect();
    Dataset::new(Matrix::from_vec(n, dims, data).expect("sized"), labels, names).expect("binary labels")
}

/// A CSV in the UCI Taiwan credit-card layout (ID, 23 explanatory columns,
/// target) with roughly 22% defaults that depend on repayment status,
/// utilisation and limit.
pub fn taiwan_like_csv(rows: usize, seed: u64) -> String {
    let mut rng = Rng::new(seed);
    let mut out = String::from(
        "ID,LIMIT_BAL,SEX,EDUCATION,MARRIAGE,AGE,PAY_0,PAY_2,PAY_3,PAY_4,PAY_5,PAY_6,\
         BILL_AMT1,BILL_AMT2,BILL_AMT3,BILL_AMT4,BILL_AMT5,BILL_AMT6,\
         PAY_AMT1,PAY_AMT2,PAY_AMT3,PAY_AMT4,PAY_AMT5,PAY_AMT6,default payment next month\n",
    );
    for id in 1..=rows {
        let limit = 10_000.0 * (1 + rng.below(80)) as f64;
        let sex = 1 + rng.below(2);
        let education = rng.below(7);
        let marriage = rng.below(4);
        let age = 21 + rng.below(50);
        let risk = rng.next_f64();
        let pay: Vec<i64> = (0..6)
            .map(|_| {
                let base = (risk * 5.0).floor() as i64 - 2;
                (base + rng.below(3) as i64 - 1).clamp(-2, 8)
            })
            .collect();
        let utilisation = (0.2 + 0.8 * risk + rng.uniform(-0.15, 0.15)).clamp(0.0, 1.2);
        let bills: Vec<i64> = (0..6).map(|_| (limit * utilisation * rng.uniform(0.8, 1.0)) as i64).collect();
        let payments: Vec<i64> = bills
            .iter()
            .map(|&b| (b as f64 * (1.0 - risk) * rng.uniform(0.0, 0.3)) as i64)
            .collect();
        let score = 2.6 * risk + 0.6 * utilisation - limit / 1_000_000.0 + rng.uniform(-0.5, 0.5);
        let default = u8::from(score > 2.15);
        let mut cells = vec![
            id.to_string(),
            format!("{limit}"),
            sex.to_string(),
            education.to_string(),
            marriage.to_string(),
            age.to_string(),
        ];
        cells.extend(pay.iter().map(i64::to_string));
        cells.extend(bills.iter().map(i64::to_string));
        cells.extend(payments.iter().map(i64::to_string));
        cells.push(default.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
