use std::path::{Path, PathBuf};

use sipkit::codec::{read_gray, read_image, write_image, DecodedImage, Format};
use sipkit::pipeline::{demo_fft, pipeline_cells, pipeline_ocr, CellsParams, OcrParams};
use sipkit::{BinaryImage, Error, Image};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read_mask(path: &Path) -> BinaryImage {
    read_gray::<f64>(path).unwrap().map(|&v| v >= 0.5)
}

#[test]
fn bundled_fixtures_match_generators() {
    let g: Image<f64> = read_gray(fixture("glyph_a.png")).unwrap();
    let expected = sipkit::point::real_to_gray16(&sipkit::fixtures::glyph_a(1));
    assert_eq!(sipkit::point::real_to_gray16(&g), expected);
}

#[test]
fn ocr_on_glyph() {
    let out = tempfile::tempdir().unwrap();
    let report = pipeline_ocr(&fixture("glyph_a.png"), &OcrParams::default(), out.path()).unwrap();
    assert_eq!(report.result("components"), Some("1"));
    assert_eq!(report.result("holes"), Some("1"));
    assert_eq!(report.result("has_2x2_block"), Some("false"));
    for stage in &report.stages {
        assert!(out.path().join(&stage.file).exists(), "{}", stage.file);
    }
    let fg = read_mask(&out.path().join("c_inverted.png"));
    let low = read_mask(&out.path().join("d_skeleton_low.png"));
    let high = read_mask(&out.path().join("e_skeleton.png"));
    assert!(high.is_subset_of(&low) && low.is_subset_of(&fg));
    assert!(high.count_ones() < low.count_ones());
    let text = std::fs::read_to_string(out.path().join("report.txt")).unwrap();
    assert!(text.lines().all(|l| l.split_once('=').is_some()));
    assert!(!text.contains(".ms="));
}

#[test]
fn ocr_rejects_blank_page() {
    let out = tempfile::tempdir().unwrap();
    let blank = out.path().join("blank.png");
    write_image(&DecodedImage::Gray(Image::filled(20, 20, 65535)), &blank, Format::Png).unwrap();
    let err = pipeline_ocr(&blank, &OcrParams::default(), &out.path().join("run")).unwrap_err();
    assert!(matches!(err, Error::DegenerateMask(_)));
    assert!(!err.is_io_or_codec());
}

#[test]
fn cells_counts() {
    let out = tempfile::tempdir().unwrap();
    let two = pipeline_cells(&fixture("two_cells.png"), &CellsParams::default(), out.path()).unwrap();
    assert_eq!(two.result("objects"), Some("2"));
    assert_eq!(two.result("regions"), two.result("minima"));
    let one = pipeline_cells(&fixture("one_cell.png"), &CellsParams::default(), out.path()).unwrap();
    assert_eq!(one.result("objects"), Some("1"));
}

#[test]
fn cells_artifacts() {
    let out = tempfile::tempdir().unwrap();
    pipeline_cells(&fixture("two_cells.png"), &CellsParams::default(), out.path()).unwrap();
    let DecodedImage::Indexed(labels) = read_image(out.path().join("w_labels.png")).unwrap() else {
        panic!("labels are paletted");
    };
    assert_eq!(labels.map().len(), 10);
    let DecodedImage::Gray(sq) = read_image(out.path().join("d_distance_squared.pgm")).unwrap() else {
        panic!("distance is gray");
    };
    // nearest outside pixel to a centre is at offset (20, 1)
    assert_eq!(sq.iter().copied().max(), Some(401));
    let mut grid = csv::Reader::from_path(out.path().join("d_distance.csv")).unwrap();
    let rows: Vec<_> = grid.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 100 * 70);
    let max = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert_eq!(max, 1.0);
}

#[test]
fn distance_peaks_lie_inside_each_disc() {
    let img: Image<f64> = read_gray(fixture("two_cells.png")).unwrap();
    let mask = img.map(|&v| v < 0.9);
    let d: Image<f64> = sipkit::dist::edt(&mask).unwrap();
    for (cx, x0, x1) in [(35.0, 0, 50), (65.0, 50, 100)] {
        let (mut best, mut at) = (0.0, (0, 0));
        for y in 0..70 {
            for x in x0..x1 {
                if d.get(x, y) > best {
                    best = d.get(x, y);
                    at = (x, y);
                }
            }
        }
        let r = ((at.0 as f64 - cx).powi(2) + (at.1 as f64 - 35.0).powi(2)).sqrt();
        assert!(r < 20.0 && best >= 19.0, "peak {at:?} value {best}");
    }
}

#[test]
fn fft_demo_outputs() {
    let out = tempfile::tempdir().unwrap();
    let report = demo_fft(out.path()).unwrap();
    let err: f64 = report.result("max_roundtrip_error").unwrap().parse().unwrap();
    assert!(err < 1e-9);
    let mut r = csv::Reader::from_path(out.path().join("spectrum.csv")).unwrap();
    let mags: Vec<f64> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            let (re, im): (f64, f64) = (rec[1].parse().unwrap(), rec[2].parse().unwrap());
            re.hypot(im)
        })
        .collect();
    assert_eq!(mags.len(), 32);
    // real input: magnitude is symmetric about the centre bin
    for k in 1..16 {
        assert!((mags[16 + k] - mags[16 - k]).abs() < 1e-9);
    }
}
