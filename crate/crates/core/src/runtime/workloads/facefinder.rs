//! Compute-heavy image kernel standing in for face detection.
//!
//! Input: width and height as big-endian `u32`, then `width * height`
//! grayscale bytes in row-major order. The kernel box-filters every
//! `WINDOW x WINDOW` window directly (cost grows with pixels times window
//! area), then counts windows whose mean brightness reaches `THRESHOLD` and
//! that are local maxima among their eight neighbouring windows.

use super::WorkloadError;

pub const WINDOW: usize = 8;
pub const THRESHOLD: u32 = 160;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.pixels.len());
        out.extend_from_slice(&(self.width as u32).to_be_bytes());
        out.extend_from_slice(&(self.height as u32).to_be_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }
}

pub fn parse(input: &[u8]) -> Result<Image, WorkloadError> {
    let err = |m: String| WorkloadError::parse("facefinder", m);
    if input.len() < 8 {
        return Err(err(format!("header needs 8 bytes, got {}", input.len())));
    }
    let width = u32::from_be_bytes(input[0..4].try_into().unwrap()) as usize;
    let height = u32::from_be_bytes(input[4..8].try_into().unwrap()) as usize;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| err("image dimensions overflow".into()))?;
    let pixels = &input[8..];
    if pixels.len() != expected {
        return Err(err(format!(
            "{width}x{height} image needs {expected} pixel bytes, got {}",
            pixels.len()
        )));
    }
    Ok(Image {
        width,
        height,
        pixels: pixels.to_vec(),
    })
}

fn window_sums(img: &Image) -> (usize, usize, Vec<u32>) {
    if img.width < WINDOW || img.height < WINDOW {
        return (0, 0, Vec::new());
    }
    let cols = img.width - WINDOW + 1;
    let rows = img.height - WINDOW + 1;
    let mut sums = vec![0u32; cols * rows];
    for y in 0..rows {
        for x in 0..cols {
            let mut acc = 0u32;
            for dy in 0..WINDOW {
                let row = &img.pixels[(y + dy) * img.width + x..][..WINDOW];
                acc += row.iter().map(|&p| u32::from(p)).sum::<u32>();
            }
            sums[y * cols + x] = acc;
        }
    }
    (cols, rows, sums)
}

pub fn count_faces(img: &Image) -> u64 {
    let (cols, rows, sums) = window_sums(img);
    let threshold = THRESHOLD * (WINDOW * WINDOW) as u32;
    let mut faces = 0;
    for y in 0..rows {
        for x in 0..cols {
            let here = sums[y * cols + x];
            if here < threshold {
                continue;
            }
            let mut peak = true;
            'scan: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= cols as i64 || ny >= rows as i64 {
                        continue;
                    }
                    let other = sums[ny as usize * cols + nx as usize];
                    // Earlier windows in raster order must be strictly lower,
                    // so a plateau is credited to its first window only.
                    let earlier = (dy, dx) < (0, 0);
                    if other > here || (earlier && other == here) {
                        peak = false;
                        break 'scan;
                    }
                }
            }
            if peak {
                faces += 1;
            }
        }
    }
    faces
}

pub fn run(input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
    let img = parse(input)?;
    Ok(format!("{}\n", count_faces(&img)).into_bytes())
}
