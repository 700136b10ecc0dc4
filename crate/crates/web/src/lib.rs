//! Browser bindings: mode analysis with a mixing curve, and embed/check on
//! grayscale pixel buffers. Errors cross the boundary as strings.

use dhci_core::analysis::{full_report, ReportConfig};
use dhci_core::dhci::{dhci_check, dhci_embed, EmbeddingParams};
use dhci_core::markov::{build_markov, evolve, DistributionVector};
use dhci_core::media_io::{bits_to_image, image_to_bits, GrayImage};
use dhci_core::modes::{constant_zero_mode, generate_valid_mode, identity_mode, negation_mode, ModeInstance};
use dhci_core::{BitStream, ModeSpec, SecretKey};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_CURVE_STEPS: u32 = 4096;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn builtin(kind: &str, n: usize, seed: u64) -> Result<ModeInstance, String> {
    match kind {
        "negation" => negation_mode(n).map_err(err),
        "identity" => identity_mode(n).map_err(err),
        "zero" => constant_zero_mode(n).map_err(err),
        "generated" => generate_valid_mode(n, seed, 1000).map(|g| g.mode).map_err(err),
        other => Err(format!("unknown mode {other}")),
    }
}

#[derive(Serialize)]
struct Analysis {
    report: dhci_core::SecurityReport,
    truth_table: Vec<u32>,
    /// Distance to uniform from state 0 after 0, 1, ... steps.
    tv_curve: Vec<f64>,
}

/// Security report of a built-in mode (`negation`, `identity`, `zero` or
/// `generated`) as JSON, with the distance to uniform over `steps` steps.
#[wasm_bindgen]
pub fn analyze_mode(kind: &str, n: u32, seed: u64, steps: u32) -> Result<String, String> {
    if steps > MAX_CURVE_STEPS {
        return Err(format!("at most {MAX_CURVE_STEPS} steps"));
    }
    let mode = builtin(kind, n as usize, seed)?;
    let key = SecretKey::new(vec![0]).map_err(err)?;
    let report = full_report(&mode, kind, &ReportConfig::new(key)).map_err(err)?;
    let markov = build_markov(&mode).map_err(err)?;
    let mut pi = DistributionVector::point_mass(mode.n(), 0).map_err(err)?;
    let mut tv_curve = vec![pi.distance_to_uniform()];
    for _ in 0..steps {
        pi = evolve(&pi, &markov, 1).map_err(err)?;
        tv_curve.push(pi.distance_to_uniform());
    }
    let out = Analysis { report, truth_table: mode.truth_table().to_vec(), tv_curve };
    serde_json::to_string(&out).map_err(err)
}

fn params(key_hex: &str, q: u32, tau: f64) -> Result<EmbeddingParams, String> {
    let key = SecretKey::from_hex(key_hex).map_err(err)?;
    let mut p = EmbeddingParams::with_defaults(ModeSpec::Negation, key);
    p.q = u64::from(q.max(1));
    p.tau = tau;
    Ok(p)
}

fn host(width: u32, height: u32, pixels: &[u8]) -> Result<BitStream, String> {
    let img = GrayImage::new(width as usize, height as usize, pixels.to_vec()).map_err(err)?;
    Ok(image_to_bits(&img))
}

/// Embeds the UTF-8 `message` into a grayscale cover with the negation mode
/// and returns the stego pixels.
#[wasm_bindgen]
pub fn embed_pixels(
    width: u32,
    height: u32,
    pixels: &[u8],
    key_hex: &str,
    message: &str,
    q: u32,
) -> Result<Vec<u8>, String> {
    let p = params(key_hex, q, dhci_core::dhci::DEFAULT_TAU)?;
    let x = host(width, height, pixels)?;
    let z = dhci_embed(&x, &BitStream::from_bytes(message.as_bytes()), &p).map_err(err)?;
    Ok(bits_to_image(&z, width as usize, height as usize).map_err(err)?.into_pixels())
}

#[derive(Serialize)]
struct Check {
    similarity: f64,
    marked: bool,
    lsc_count: usize,
}

/// Compares a candidate against the watermark expected from the cover and
/// returns `{similarity, marked, lsc_count}` as JSON.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn check_pixels(
    width: u32,
    height: u32,
    cover: &[u8],
    candidate: &[u8],
    key_hex: &str,
    message: &str,
    q: u32,
    tau: f64,
) -> Result<String, String> {
    let p = params(key_hex, q, tau)?;
    let x = host(width, height, cover)?;
    let z = host(width, height, candidate)?;
    let out = dhci_check(&x, &z, &BitStream::from_bytes(message.as_bytes()), &p).map_err(err)?;
    serde_json::to_string(&Check { similarity: out.similarity, marked: out.marked, lsc_count: out.lsc_count })
        .map_err(err)
}
