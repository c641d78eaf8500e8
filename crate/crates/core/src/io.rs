//! PNG-backed storage for the raster types.
//!
//! Binary pages are 8-bit grayscale with ink stored as 255; any value
//! `>= 128` reads back as foreground. Label rasters are 16-bit grayscale
//! with 0 as background.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, ImageReader, Luma, Rgb};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, GrayRaster, LabelRaster};

/// 8-bit RGB image, used for overlays.
pub type RgbImage = ImageBuffer<Rgb<u8>, Vec<u8>>;

fn map_image_err(path: &Path, err: image::ImageError) -> Error {
    match err {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::Format {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

fn open(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    let reader = reader.with_guessed_format().map_err(|e| Error::io(path, e))?;
    if reader.format() != Some(ImageFormat::Png) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "not a PNG file".into(),
        });
    }
    reader.decode().map_err(|e| map_image_err(path, e))
}

fn gray8(path: &Path, img: DynamicImage) -> Result<GrayRaster> {
    match img {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            GrayRaster::from_data(w, h, buf.into_raw())
        }
        other => Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("expected 8-bit grayscale PNG, found {:?}", other.color()),
        }),
    }
}

fn threshold(gray: &GrayRaster) -> BinaryRaster {
    let bits = gray.data().iter().map(|&v| v >= 128).collect();
    BinaryRaster::from_bits(gray.width(), gray.height(), bits).expect("dimensions carried over")
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayRaster> {
    let path = path.as_ref();
    gray8(path, open(path)?)
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<BinaryRaster> {
    load_gray(path).map(|g| threshold(&g))
}

pub fn write_gray(gray: &GrayRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(gray.width(), gray.height(), gray.data().to_vec())
            .expect("buffer sized from raster");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| map_image_err(path, e))
}

pub fn write_binary(raster: &BinaryRaster, path: impl AsRef<Path>) -> Result<()> {
    write_gray(&GrayRaster::from_binary(raster), path)
}

fn label_buffer(labels: &LabelRaster) -> Result<ImageBuffer<Luma<u16>, Vec<u16>>> {
    let max = labels.max_label();
    if max > u16::MAX as u32 {
        return Err(Error::LabelOverflow { label: max });
    }
    let data = labels.labels().iter().map(|&l| l as u16).collect();
    Ok(ImageBuffer::from_raw(labels.width(), labels.height(), data).expect("buffer sized from raster"))
}

/// Writes a 16-bit grayscale PNG. Labels above 65535 are rejected.
pub fn write_label_raster(labels: &LabelRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf = label_buffer(labels)?;
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| map_image_err(path, e))
}

/// Reads a 16-bit label PNG. 8-bit grayscale files are accepted as well.
pub fn load_label_raster(path: impl AsRef<Path>) -> Result<LabelRaster> {
    let path = path.as_ref();
    match open(path)? {
        DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            LabelRaster::from_labels(w, h, buf.into_raw().into_iter().map(u32::from).collect())
        }
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            LabelRaster::from_labels(w, h, buf.into_raw().into_iter().map(u32::from).collect())
        }
        other => Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("expected 16-bit grayscale PNG, found {:?}", other.color()),
        }),
    }
}

pub fn write_rgb(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| map_image_err(path, e))
}

/// In-memory PNG encoding of a binary raster (ink = 255).
pub fn encode_binary_png(raster: &BinaryRaster) -> Vec<u8> {
    let gray = GrayRaster::from_binary(raster);
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(gray.width(), gray.height(), gray.data().to_vec())
            .expect("buffer sized from raster");
    let mut out = Vec::new();
    buf.write_to(&mut Cursor::new(&mut out), ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    out
}

/// Decodes an 8-bit grayscale PNG held in memory, thresholding at 128.
pub fn decode_binary_png(bytes: &[u8]) -> Result<BinaryRaster> {
    let pseudo = Path::new("<memory>");
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| map_image_err(pseudo, e))?;
    gray8(pseudo, img).map(|g| threshold(&g))
}
