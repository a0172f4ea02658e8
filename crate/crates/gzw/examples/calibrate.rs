//! Prints per-attack mean BER over a synthetic corpus; used to sanity-check
//! robustness behavior against the benchmark guardrails.

use gzw::eval::{evaluate, EvalOptions};
use gzw::io::CellStatus;
use gzw::synth::music_like;
use gzw::watermark::BinaryImage;

fn main() {
    let n_clips: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10);
    let secs: f64 = std::env::args()
        .nth(2)
        .and_then(|a| a.parse().ok())
        .unwrap_or(64.0);

    let t0 = std::time::Instant::now();
    let clips: Vec<(String, gzw::AudioClip)> = (0..n_clips)
        .map(|i| (format!("clip{i:02}"), music_like(secs, 44100, i as u64)))
        .collect();
    eprintln!("generated {n_clips} x {secs}s in {:?}", t0.elapsed());

    let mut state = 0xabcdef12345u64;
    let pixels: Vec<u8> = (0..4096)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 60) & 1) as u8
        })
        .collect();
    let img = BinaryImage::new(64, 64, pixels).unwrap();

    let t1 = std::time::Instant::now();
    let eval = evaluate(&clips, &img, &EvalOptions::default()).unwrap();
    eprintln!("evaluated in {:?}", t1.elapsed());

    let suite: Vec<String> = {
        let mut seen = Vec::new();
        for c in &eval.cells {
            if !seen.contains(&c.attack) {
                seen.push(c.attack.clone());
            }
        }
        seen
    };
    for attack in suite {
        let oks: Vec<f64> = eval
            .cells
            .iter()
            .filter(|c| c.attack == attack && c.status == CellStatus::Ok)
            .filter_map(|c| c.ber)
            .collect();
        if oks.is_empty() {
            println!("{attack:20} skipped");
        } else {
            let mean = oks.iter().sum::<f64>() / oks.len() as f64;
            let max = oks.iter().cloned().fold(0.0f64, f64::max);
            println!("{attack:20} mean BER {mean:.4}  max {max:.4}");
        }
    }
}
