//! `sipkit` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage errors (including out-of-range
//! parameter values), 2 for file and codec errors, 3 for errors raised by
//! the image operators.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sipkit::codec::{read_gray, read_image, write_image, DecodedImage, Format};
use sipkit::dist::{edt, edt_limited, edt_squared, squared_to_gray16};
use sipkit::filter::{gaussian_blur, median_filter, sobel_edges};
use sipkit::geom::{affine_warp, rotate, zoom, AffineMap, Interpolation};
use sipkit::morph::{dilate_disc, erode_disc, skeleton};
use sipkit::pipeline::{demo_fft, pipeline_cells, pipeline_ocr, CellsParams, OcrParams, PipelineReport};
use sipkit::point::{binary_to_gray16, equalize, invert, real_to_gray16, threshold};
use sipkit::seg::{count_objects, watershed};
use sipkit::{BinaryImage, Error, Image, LabelImage};

const THREADS_VAR: &str = "SIPKIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sipkit", version, about = "Image operators and example pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InOut {
    /// Input image (PNG, PGM or PPM; detected from content)
    input: PathBuf,
    /// Output image; format chosen by extension (.png, .pgm, .ppm), PNG otherwise
    output: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert to 16-bit grayscale
    ToGray(InOut),
    /// Binarize: 1 where the sample is at least the threshold
    #[command(allow_negative_numbers = true)]
    Threshold {
        #[arg(long)]
        threshold: f64,
        #[command(flatten)]
        io: InOut,
    },
    /// Negative image, 1 - x
    Invert(InOut),
    /// Histogram equalization
    Equalize(InOut),
    /// Gaussian blur
    #[command(allow_negative_numbers = true)]
    Blur {
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        #[command(flatten)]
        io: InOut,
    },
    /// Square-window median filter
    Median {
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[command(flatten)]
        io: InOut,
    },
    /// Sobel edge map, threshold relative to the strongest edge
    #[command(allow_negative_numbers = true)]
    Edge {
        #[arg(long, default_value_t = 0.15)]
        threshold: f64,
        #[command(flatten)]
        io: InOut,
    },
    /// Rotate about the centre; positive angles turn clockwise
    #[command(allow_negative_numbers = true)]
    Rotate {
        #[arg(long)]
        degrees: f64,
        #[arg(long, default_value = "bilinear")]
        interp: Interpolation,
        #[command(flatten)]
        io: InOut,
    },
    /// Uniform scaling
    #[command(allow_negative_numbers = true)]
    Zoom {
        #[arg(long)]
        factor: f64,
        #[arg(long, default_value = "bilinear")]
        interp: Interpolation,
        #[command(flatten)]
        io: InOut,
    },
    /// General affine warp; the map sends output pixels to input coordinates
    Affine {
        /// Row-major "a11,a12,tx,a21,a22,ty"
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Output size "WxH" (defaults to the input size)
        #[arg(long)]
        size: Option<String>,
        #[arg(long, default_value = "bilinear")]
        interp: Interpolation,
        #[command(flatten)]
        io: InOut,
    },
    /// Euclidean distance to the background of a mask (foreground >= 0.5)
    #[command(allow_negative_numbers = true)]
    Bwdist {
        /// Write squared distances instead of distances rounded to whole pixels
        #[arg(long)]
        squared: bool,
        /// Only resolve distances up to this limit
        #[arg(long, conflicts_with = "squared")]
        dmax: Option<f64>,
        #[command(flatten)]
        io: InOut,
    },
    /// Dilation by a disc
    #[command(allow_negative_numbers = true)]
    Dilate {
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        io: InOut,
    },
    /// Erosion by a disc
    #[command(allow_negative_numbers = true)]
    Erode {
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        io: InOut,
    },
    /// Multiscale skeleton field, or the pruned skeleton with --threshold
    #[command(allow_negative_numbers = true)]
    Skel {
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        io: InOut,
    },
    /// Watershed labels written as raw 16-bit gray values
    Watershed(InOut),
    /// Count objects in a label image (regions minus background)
    Count {
        input: PathBuf,
    },
    /// Blur, binarize, skeletonize and prune a glyph
    #[command(allow_negative_numbers = true)]
    PipelineOcr {
        input: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
        /// Pruning scale of the final skeleton
        #[arg(long, default_value_t = 0.5)]
        skel_threshold: f64,
    },
    /// Segment and count cells
    #[command(allow_negative_numbers = true)]
    PipelineCells {
        input: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Transform the three-cosine signal and write plot data
    DemoFft {
        #[arg(long)]
        outdir: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Op(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Op(e)
    }
}

type CmdResult = Result<(), Failure>;

fn output_format(path: &Path) -> Format {
    Format::from_extension(path).unwrap_or(Format::Png)
}

fn write_gray(img: &Image<f64>, path: &Path) -> CmdResult {
    let clamped = img.map(|&v| v.clamp(0.0, 1.0));
    write_image(&DecodedImage::Gray(real_to_gray16(&clamped)), path, output_format(path))?;
    Ok(())
}

fn write_mask(mask: &BinaryImage, path: &Path) -> CmdResult {
    write_image(&DecodedImage::Gray(binary_to_gray16(mask)), path, output_format(path))?;
    Ok(())
}

fn read_mask(path: &Path) -> Result<BinaryImage, Error> {
    Ok(read_gray::<f64>(path)?.map(|&v| v >= 0.5))
}

fn parse_matrix(text: &str) -> Result<AffineMap, Failure> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("--matrix: {e}")))?;
    let values: [f64; 6] = values
        .try_into()
        .map_err(|v: Vec<f64>| Failure::Usage(format!("--matrix needs 6 numbers, got {}", v.len())))?;
    Ok(AffineMap::from_row_major(values)?)
}

fn parse_size(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--size `{text}` is not of the form WxH"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
}

fn print_report(report: &PipelineReport) {
    print!("{}", report.to_key_values(true));
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::ToGray(io) => {
            let gray = read_image(&io.input)?.to_gray16();
            write_image(&DecodedImage::Gray(gray), &io.output, output_format(&io.output))?;
        }
        Command::Threshold { threshold: t, io } => {
            write_mask(&threshold(&read_gray::<f64>(&io.input)?, t)?, &io.output)?;
        }
        Command::Invert(io) => write_gray(&invert(&read_gray::<f64>(&io.input)?), &io.output)?,
        Command::Equalize(io) => {
            let eq = equalize(&read_image(&io.input)?.to_gray16());
            write_image(&DecodedImage::Gray(eq), &io.output, output_format(&io.output))?;
        }
        Command::Blur { sigma, io } => {
            write_gray(&gaussian_blur(&read_gray::<f64>(&io.input)?, sigma)?, &io.output)?;
        }
        Command::Median { radius, io } => {
            write_gray(&median_filter(&read_gray::<f64>(&io.input)?, radius), &io.output)?;
        }
        Command::Edge { threshold: t, io } => {
            write_mask(&sobel_edges(&read_gray::<f64>(&io.input)?, t)?, &io.output)?;
        }
        Command::Rotate { degrees, interp, io } => {
            write_gray(&rotate(&read_gray::<f64>(&io.input)?, degrees, interp)?, &io.output)?;
        }
        Command::Zoom { factor, interp, io } => {
            write_gray(&zoom(&read_gray::<f64>(&io.input)?, factor, interp)?, &io.output)?;
        }
        Command::Affine {
            matrix,
            size,
            interp,
            io,
        } => {
            let map = parse_matrix(&matrix)?;
            let img = read_gray::<f64>(&io.input)?;
            let (w, h) = match size {
                Some(s) => parse_size(&s)?,
                None => img.dimensions(),
            };
            write_gray(&affine_warp(&img, &map, w, h, interp)?, &io.output)?;
        }
        Command::Bwdist { squared, dmax, io } => {
            let mask = read_mask(&io.input)?;
            let (samples, clamped) = if squared {
                squared_to_gray16(&edt_squared(&mask)?)
            } else {
                let d: Image<f64> = match dmax {
                    Some(limit) => edt_limited(&mask, limit)?,
                    None => edt(&mask)?,
                };
                let clamped = d.iter().filter(|&&v| v.round() > 65535.0).count();
                (d.map(|&v| v.round().min(65535.0) as u16), clamped)
            };
            write_image(&DecodedImage::Gray(samples), &io.output, output_format(&io.output))?;
            println!("clamped={clamped}");
        }
        Command::Dilate { radius, io } => write_mask(&dilate_disc(&read_mask(&io.input)?, radius)?, &io.output)?,
        Command::Erode { radius, io } => write_mask(&erode_disc(&read_mask(&io.input)?, radius)?, &io.output)?,
        Command::Skel { threshold: t, io } => {
            let field = skeleton::<f64>(&read_mask(&io.input)?)?;
            match t {
                Some(t) => write_mask(&field.prune(t)?, &io.output)?,
                None => write_gray(field.values(), &io.output)?,
            }
        }
        Command::Watershed(io) => {
            let labels = watershed(&read_gray::<f64>(&io.input)?);
            let n = labels.iter().copied().max().unwrap_or(0);
            if n > u32::from(u16::MAX) {
                return Err(Error::Encode(format!("{n} labels do not fit 16-bit samples")).into());
            }
            let raw = labels.map(|&l| l as u16);
            write_image(&DecodedImage::Gray(raw), &io.output, output_format(&io.output))?;
            println!("regions={n}");
        }
        Command::Count { input } => {
            let raw = match read_image(&input)? {
                DecodedImage::Gray(g) => g,
                _ => return Err(Failure::Usage("count expects a gray label image".into())),
            };
            let labels: LabelImage = raw.map(|&v| u32::from(v));
            println!("objects={}", count_objects(&labels));
        }
        Command::PipelineOcr {
            input,
            outdir,
            sigma,
            threshold,
            skel_threshold,
        } => {
            let params = OcrParams {
                sigma,
                bin_t: threshold,
                skel_t: skel_threshold,
                ..OcrParams::default()
            };
            print_report(&pipeline_ocr(&input, &params, &outdir)?);
        }
        Command::PipelineCells {
            input,
            outdir,
            threshold,
            radius,
        } => {
            let params = CellsParams {
                bin_t: threshold,
                median_r: radius,
            };
            print_report(&pipeline_cells(&input, &params, &outdir)?);
        }
        Command::DemoFft { outdir } => print_report(&demo_fft(&outdir)?),
    }
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR}=`{value}` is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure {n} threads: {e}"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("sipkit: {msg}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("sipkit: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Op(e)) => {
            eprintln!("sipkit: {e}");
            let code = match e {
                Error::InvalidParameter { .. } => 1,
                ref e if e.is_io_or_codec() => 2,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}
