//! Binary 8-bit PGM (P5) and PPM (P6) images.

use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::inpaint::Image;

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn encode(image: &Image) -> Result<Vec<u8>> {
    let magic = match image.channels.len() {
        1 => "P5",
        3 => "P6",
        n => return Err(Error::Image(format!("{n} channels; need 1 or 3"))),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    for i in 0..image.width * image.height {
        for c in &image.channels {
            out.push(to_byte(c[i]));
        }
    }
    Ok(out)
}

fn header_tokens(bytes: &[u8]) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Image("truncated header".into()));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // Exactly one whitespace byte separates the header from the raster.
    Ok((tokens, pos + 1))
}

pub fn decode(bytes: &[u8]) -> Result<Image> {
    let (t, start) = header_tokens(bytes)?;
    let channels = match t[0].as_str() {
        "P5" => 1,
        "P6" => 3,
        m => return Err(Error::Image(format!("unsupported magic {m:?}"))),
    };
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Image(format!("bad header field {s:?}")));
    let (w, h, maxval) = (parse(&t[1])?, parse(&t[2])?, parse(&t[3])?);
    if maxval != 255 {
        return Err(Error::Image(format!("maxval {maxval}; only 8-bit images are supported")));
    }
    let n = w * h * channels;
    let raster = bytes
        .get(start..start + n)
        .ok_or_else(|| Error::Image("truncated raster".into()))?;
    let mut ch = vec![Vec::with_capacity(w * h); channels];
    for (i, &b) in raster.iter().enumerate() {
        ch[i % channels].push(b as f64 / 255.0);
    }
    Image::new(w, h, ch)
}

pub fn read(path: &Path) -> Result<Image> {
    decode(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn write(path: &Path, image: &Image) -> Result<()> {
    std::fs::write(path, encode(image)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_exact_round_trip() {
        let img = Image::new(3, 2, vec![(0..6).map(|i| i as f64 / 5.0).collect(); 3]).unwrap();
        let bytes = encode(&img).unwrap();
        let back = decode(&bytes).unwrap();
        assert_eq!(encode(&back).unwrap(), bytes);
        let gray = Image::new(2, 2, vec![vec![0.0, 1.0, 0.5, 0.25]]).unwrap();
        let bytes = encode(&gray).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(encode(&decode(&bytes).unwrap()).unwrap(), bytes);
    }

    #[test]
    fn header_comments_and_errors() {
        let mut data = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        data.extend([0u8, 255]);
        let img = decode(&data).unwrap();
        assert_eq!(img.channels[0], vec![0.0, 1.0]);
        assert!(decode(b"P5\n2 1\n255\n\x00").is_err());
        assert!(decode(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode(b"P5\n1 1\n65535\n\x00\x00").is_err());
    }
}
