//! Library-level end-to-end flows: the embed/extract involution through real
//! files, attack robustness on short clips, and report determinism.

use gzw::attacks;
use gzw::eval::{evaluate, EvalOptions, SuiteAttack, SuiteKind};
use gzw::io::{read_key, read_pbm, write_key, write_pbm, write_report};
use gzw::metrics;
use gzw::synth::music_like;
use gzw::watermark::{self, BinaryImage, SchemeConfig};
use std::path::PathBuf;

fn tmp(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gzw-pipe-{}-{tag}", std::process::id()))
}

fn watermark_image(side: usize, seed: u64) -> BinaryImage {
    let mut state = seed | 1;
    let pixels: Vec<u8> = (0..side * side)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(11);
            ((state >> 62) & 1) as u8
        })
        .collect();
    BinaryImage::new(side, side, pixels).unwrap()
}

#[test]
fn involution_through_key_and_image_files() {
    let clip = music_like(4.0, 44100, 77);
    let img = watermark_image(16, 4);
    let cfg = SchemeConfig::default();

    let key = watermark::embed(&clip, &img, &cfg).unwrap();
    let key_path = tmp("inv.key");
    write_key(&key, cfg.k as u8, &key_path).unwrap();
    let loaded = read_key(&key_path).unwrap();
    assert_eq!(loaded.key, key);

    let recovered = watermark::extract(&clip, &loaded.key, 16, 16, &cfg).unwrap();
    assert_eq!(recovered, img);

    let img_path = tmp("inv.pbm");
    write_pbm(&recovered, &img_path).unwrap();
    assert_eq!(read_pbm(&img_path).unwrap(), img);

    std::fs::remove_file(&key_path).ok();
    std::fs::remove_file(&img_path).ok();
}

#[test]
fn recovery_survives_light_attacks_on_short_clips() {
    let clip = music_like(6.0, 44100, 31);
    let img = watermark_image(16, 9);
    let cfg = SchemeConfig::default();
    let key = watermark::embed(&clip, &img, &cfg).unwrap();
    let w_bits = watermark::image_to_bits(&img);

    let attacked = [
        attacks::awgn(&clip, 20.0, 5).unwrap(),
        attacks::lowpass(&clip, 11025.0).unwrap(),
        attacks::resample_chain(&clip, 22050).unwrap(),
        attacks::requantize(&clip, 8).unwrap(),
        attacks::amplitude(&clip, 1.5).unwrap(),
    ];
    for (i, a) in attacked.iter().enumerate() {
        let recovered = watermark::extract(a, &key, 16, 16, &cfg).unwrap();
        let ber = metrics::ber(&w_bits, &watermark::image_to_bits(&recovered)).unwrap();
        assert!(ber <= 0.05, "attack {i}: ber {ber}");
    }
}

#[test]
fn cropped_audio_still_yields_watermark_content() {
    let clip = music_like(6.0, 44100, 13);
    let img = watermark_image(16, 2);
    let cfg = SchemeConfig::default();
    let key = watermark::embed(&clip, &img, &cfg).unwrap();
    let n = clip.len() / img.pixel_count();

    let cropped = attacks::crop(&clip, 2, attacks::CropEnd::Back, n).unwrap();
    let recovered = watermark::extract(&cropped, &key, 16, 16, &cfg).unwrap();
    let ber = metrics::ber(
        &watermark::image_to_bits(&img),
        &watermark::image_to_bits(&recovered),
    )
    .unwrap();
    // Synchronization attacks degrade recovery; the image must still be far
    // better than chance.
    assert!(ber < 0.5, "ber {ber}");
}

#[test]
fn report_bytes_are_identical_across_runs_and_thread_counts() {
    let clips: Vec<(String, gzw::AudioClip)> = (0..2)
        .map(|i| (format!("c{i}"), music_like(3.0, 44100, 40 + i as u64)))
        .collect();
    let img = watermark_image(16, 5);
    let suite = vec![
        SuiteAttack {
            label: "none".into(),
            kind: SuiteKind::None,
        },
        SuiteAttack {
            label: "awgn_10db".into(),
            kind: SuiteKind::Awgn { snr_db: 10.0 },
        },
        SuiteAttack {
            label: "tsm_+1pct".into(),
            kind: SuiteKind::Tsm {
                stretch_percent: 1.0,
            },
        },
    ];

    let mut outputs = Vec::new();
    for jobs in [Some(1), Some(4), Some(1)] {
        let opts = EvalOptions {
            jobs,
            seed: 7,
            suite: suite.clone(),
            ..Default::default()
        };
        let eval = evaluate(&clips, &img, &opts).unwrap();
        let path = tmp(&format!("rep-{}.csv", outputs.len()));
        write_report(&eval.cells, &path).unwrap();
        outputs.push(std::fs::read(&path).unwrap());
        std::fs::remove_file(&path).ok();
    }
    assert_eq!(outputs[0], outputs[1], "thread count changed the report");
    assert_eq!(outputs[0], outputs[2], "re-run changed the report");
}

#[test]
fn extraction_reframes_from_attacked_length() {
    // TSM changes the length; extraction must still produce M bits.
    let clip = music_like(5.0, 44100, 21);
    let img = watermark_image(8, 3);
    let cfg = SchemeConfig::default();
    let key = watermark::embed(&clip, &img, &cfg).unwrap();

    let stretched = attacks::tsm(&clip, 10.0).unwrap();
    assert_ne!(stretched.len(), clip.len());
    let recovered = watermark::extract(&stretched, &key, 8, 8, &cfg).unwrap();
    assert_eq!(recovered.pixel_count(), 64);
}
