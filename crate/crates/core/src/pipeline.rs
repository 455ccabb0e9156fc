//! End-to-end pipelines: letter recognition preprocessing, cell counting and
//! the FFT demonstration. Each stage writes an artifact to the output
//! directory and the run is summarised in a [`PipelineReport`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex;

use crate::codec::{read_gray, write_image, DecodedImage, Format};
use crate::dist::{edt_squared, squared_to_gray16};
use crate::error::{Error, Result};
use crate::filter::{gaussian_blur, median_filter};
use crate::image::{ColorMap, Image, IndexedImage};
use crate::morph::skeleton;
use crate::morph::topology::{count_components, count_holes, has_full_2x2_block, Connectivity};
use crate::point::{binary_to_gray16, invert, invert_mask, mask_multiply, normalize, real_to_gray16, threshold};
use crate::seg::{count_objects, count_regional_minima, watershed};
use crate::spectral::{fft, fftshift, to_complex, Sign, ToneSignal};
use crate::{BinaryImage, LabelImage};

/// One written artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: String,
    /// File name inside the output directory.
    pub file: String,
    pub millis: f64,
}

/// Stages in execution order plus named scalar results.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    pub results: Vec<(String, String)>,
}

impl PipelineReport {
    pub fn result(&self, key: &str) -> Option<&str> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    /// `key=value` lines. Stage timings are included only on request, so the
    /// text without them is reproducible.
    pub fn to_key_values(&self, with_timings: bool) -> String {
        let mut out = String::new();
        for s in &self.stages {
            writeln!(out, "stage.{}={}", s.name, s.file).unwrap();
            if with_timings {
                writeln!(out, "stage.{}.ms={:.3}", s.name, s.millis).unwrap();
            }
        }
        for (k, v) in &self.results {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}

/// Runs stages and records their artifacts.
struct Recorder<'a> {
    outdir: &'a Path,
    report: PipelineReport,
    clock: Instant,
}

impl<'a> Recorder<'a> {
    fn new(outdir: &'a Path) -> Result<Self> {
        fs::create_dir_all(outdir)?;
        Ok(Recorder {
            outdir,
            report: PipelineReport::default(),
            clock: Instant::now(),
        })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.outdir.join(file)
    }

    /// Closes the stage started at the previous call.
    fn stage(&mut self, name: &str, file: &str) {
        let millis = self.clock.elapsed().as_secs_f64() * 1e3;
        self.report.stages.push(Stage {
            name: name.to_string(),
            file: file.to_string(),
            millis,
        });
        self.clock = Instant::now();
    }

    fn gray(&mut self, name: &str, file: &str, img: &Image<f64>) -> Result<()> {
        let clamped = img.map(|&v| v.clamp(0.0, 1.0));
        write_image(&DecodedImage::Gray(real_to_gray16(&clamped)), self.path(file), Format::Png)?;
        self.stage(name, file);
        Ok(())
    }

    fn binary(&mut self, name: &str, file: &str, mask: &BinaryImage) -> Result<()> {
        write_image(&DecodedImage::Gray(binary_to_gray16(mask)), self.path(file), Format::Png)?;
        self.stage(name, file);
        Ok(())
    }

    fn finish(self) -> Result<PipelineReport> {
        fs::write(self.outdir.join("report.txt"), self.report.to_key_values(false))?;
        Ok(self.report)
    }
}

/// Fixed ten-colour table for label images.
pub const LABEL_PALETTE: [[f64; 3]; 10] = [
    [0.90, 0.10, 0.10],
    [0.10, 0.60, 0.10],
    [0.10, 0.20, 0.90],
    [0.95, 0.75, 0.05],
    [0.60, 0.10, 0.70],
    [0.05, 0.75, 0.80],
    [0.95, 0.45, 0.05],
    [0.45, 0.30, 0.15],
    [0.95, 0.55, 0.75],
    [0.50, 0.50, 0.50],
];

/// Pseudocolour rendering of a label image through [`LABEL_PALETTE`],
/// cycling when there are more than ten labels.
pub fn colorize_labels(labels: &LabelImage) -> IndexedImage {
    let map = ColorMap::new(LABEL_PALETTE.to_vec()).expect("palette entries lie in [0, 1]");
    let index = labels.map(|&l| (l.max(1) - 1) % LABEL_PALETTE.len() as u32 + 1);
    IndexedImage::new(index, map).expect("indices stay within the palette")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcrParams {
    pub sigma: f64,
    pub bin_t: f64,
    /// Low pruning scale, kept as a stage for comparison.
    pub spur_t: f64,
    pub skel_t: f64,
}

impl Default for OcrParams {
    fn default() -> Self {
        OcrParams {
            sigma: 2.0,
            bin_t: 0.8,
            spur_t: 0.1,
            skel_t: 0.5,
        }
    }
}

/// Smooth, binarize, skeletonize and prune a dark glyph on a light
/// background. Reports the topology of the final skeleton.
pub fn pipeline_ocr(input: &Path, params: &OcrParams, outdir: &Path) -> Result<PipelineReport> {
    let mut rec = Recorder::new(outdir)?;
    let a: Image<f64> = read_gray(input)?;
    rec.gray("input", "a_input.png", &a)?;
    let b = gaussian_blur(&a, params.sigma)?;
    rec.gray("blur", "b_blur.png", &b)?;
    let c = threshold(&b, params.bin_t)?;
    rec.binary("binary", "c_binary.png", &c)?;
    let c = invert_mask(&c);
    rec.binary("inverted", "c_inverted.png", &c)?;
    let field = skeleton::<f64>(&c)?;
    rec.gray("skeleton_field", "t_skeleton_field.png", field.values())?;
    let spurs = field.prune(params.spur_t)?;
    rec.binary("skeleton_low", "d_skeleton_low.png", &spurs)?;
    let skel = field.prune(params.skel_t)?;
    rec.binary("skeleton", "e_skeleton.png", &skel)?;

    rec.report.push("sigma", params.sigma);
    rec.report.push("bin_t", params.bin_t);
    rec.report.push("spur_t", params.spur_t);
    rec.report.push("skel_t", params.skel_t);
    rec.report.push("foreground_pixels", c.count_ones());
    rec.report.push("skeleton_low_pixels", spurs.count_ones());
    rec.report.push("skeleton_pixels", skel.count_ones());
    rec.report.push("components", count_components(&skel, Connectivity::Eight));
    rec.report.push("holes", count_holes(&skel));
    rec.report.push("has_2x2_block", has_full_2x2_block(&skel));
    rec.finish()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellsParams {
    pub bin_t: f64,
    pub median_r: usize,
}

impl Default for CellsParams {
    fn default() -> Self {
        CellsParams {
            bin_t: 0.9,
            median_r: 2,
        }
    }
}

fn write_grid_csv(path: &Path, img: &Image<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["row", "col", "value"]).map_err(csv_error)?;
    for y in 0..img.height() {
        for x in 0..img.width() {
            w.write_record([y.to_string(), x.to_string(), img.get(x, y).to_string()])
                .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Encode(format!("{other:?}")),
    }
}

/// Threshold dark cells, build the distance landscape, flood it and count
/// the basins that are not background.
pub fn pipeline_cells(input: &Path, params: &CellsParams, outdir: &Path) -> Result<PipelineReport> {
    let mut rec = Recorder::new(outdir)?;
    let a: Image<f64> = read_gray(input)?;
    rec.gray("input", "a_input.png", &a)?;
    let b = invert_mask(&threshold(&a, params.bin_t)?);
    rec.binary("binary", "b_binary.png", &b)?;

    let squared = edt_squared(&b)?;
    let (pgm, clamped) = squared_to_gray16(&squared);
    write_image(&DecodedImage::Gray(pgm), rec.path("d_distance_squared.pgm"), Format::Pgm)?;
    rec.stage("distance_squared", "d_distance_squared.pgm");
    let d = normalize(&squared.map(|&v| (v as f64).sqrt()));
    rec.gray("distance", "d_distance.png", &d)?;
    write_grid_csv(&rec.path("d_distance.csv"), &d)?;
    rec.stage("distance_grid", "d_distance.csv");

    let inverted = invert(&d);
    let smoothed = median_filter(&inverted, params.median_r);
    let dm = mask_multiply(&smoothed, &b)?;
    rec.gray("flood_input", "dm_flood_input.png", &dm)?;
    let w = watershed(&dm);
    write_image(&DecodedImage::Indexed(colorize_labels(&w)), rec.path("w_labels.png"), Format::Png)?;
    rec.stage("labels", "w_labels.png");

    let regions = w.iter().copied().max().unwrap_or(0);
    rec.report.push("bin_t", params.bin_t);
    rec.report.push("median_r", params.median_r);
    rec.report.push("distance_clamped", clamped);
    rec.report.push("minima", count_regional_minima(&dm));
    rec.report.push("regions", regions);
    rec.report.push("objects", count_objects(&w));
    rec.finish()
}

fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Transforms the three-cosine signal, writes the signals, the centred
/// spectrum and the inverse transform, and reports the roundtrip error.
pub fn demo_fft(outdir: &Path) -> Result<PipelineReport> {
    let mut rec = Recorder::new(outdir)?;
    let s = ToneSignal::new();
    write_columns(
        &rec.path("signals.csv"),
        &["a", "c1", "c2", "c3", "c"],
        &[&s.a, &s.c1, &s.c2, &s.c3, &s.c],
    )?;
    rec.stage("signals", "signals.csv");

    let x: Vec<Complex<f64>> = to_complex(&s.c);
    let spectrum = fft(&x, Sign::Negative)?;
    let shifted = fftshift(&spectrum);
    let n = shifted.len() as i64;
    let bins: Vec<f64> = (0..n).map(|k| (k - n / 2) as f64).collect();
    let re: Vec<f64> = shifted.iter().map(|v| v.re).collect();
    let im: Vec<f64> = shifted.iter().map(|v| v.im).collect();
    write_columns(&rec.path("spectrum.csv"), &["bin", "re", "im"], &[&bins, &re, &im])?;
    rec.stage("spectrum", "spectrum.csv");

    let back = fft(&spectrum, Sign::Positive)?;
    let back_re: Vec<f64> = back.iter().map(|v| v.re).collect();
    let back_im: Vec<f64> = back.iter().map(|v| v.im).collect();
    write_columns(
        &rec.path("roundtrip.csv"),
        &["a", "c", "re", "im"],
        &[&s.a, &s.c, &back_re, &back_im],
    )?;
    rec.stage("roundtrip", "roundtrip.csv");

    let err = back.iter().zip(&x).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    rec.report.push("length", s.c.len());
    rec.report.push("max_roundtrip_error", format!("{err:e}"));
    rec.finish()
}
