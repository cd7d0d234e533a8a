use std::hash::Hasher;
use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Row-major interleaved RGB.
    pub rgb: Vec<u8>,
    /// Perpendicular distance in world units, one per pixel.
    pub depth: Option<Vec<f32>>,
}

/// Depth quantization used for 8-bit exports: 1/8 unit steps up to 31.875.
pub fn quantize_depth(d: f32) -> u8 {
    (d * 8.0).round().clamp(0.0, 255.0) as u8
}

impl Frame {
    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn depth8(&self) -> Option<Vec<u8>> {
        self.depth.as_ref().map(|d| d.iter().map(|&v| quantize_depth(v)).collect())
    }

    /// Integer luma, `(77 R + 150 G + 29 B) >> 8`.
    pub fn gray(&self) -> Vec<u8> {
        self.rgb
            .chunks_exact(3)
            .map(|p| ((77 * p[0] as u32 + 150 * p[1] as u32 + 29 * p[2] as u32) >> 8) as u8)
            .collect()
    }

    /// FNV-1a over dimensions, RGB bytes and depth bit patterns.
    pub fn hash(&self) -> u64 {
        let mut h = fnv::FnvHasher::default();
        h.write_u32(self.width as u32);
        h.write_u32(self.height as u32);
        h.write(&self.rgb);
        if let Some(depth) = &self.depth {
            for v in depth {
                h.write_u32(v.to_bits());
            }
        }
        h.finish()
    }

    pub fn write_png<W: Write>(&self, out: W) -> io::Result<()> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(io::Error::other)?;
        writer.write_image_data(&self.rgb).map_err(io::Error::other)?;
        writer.finish().map_err(io::Error::other)
    }

    /// Binary PGM (P5) of the quantized depth buffer.
    pub fn write_depth_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let Some(depth8) = self.depth8() else {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "frame has no depth buffer"));
        };
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&depth8)
    }
}
