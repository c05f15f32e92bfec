//! Versioned binary checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    b"DKAE"
//! version  u32 (currently 1)
//! transfer u32 (0 = sigmoid)
//! layers   u32 L
//! dims     (L + 1) × u64
//! per layer: weight (out·in f64, row-major), b_enc (out f64), b_dec (in f64)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::network::{LayerParams, Network, Transfer};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"DKAE";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint(net: &Network, w: &mut impl Write) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&net.transfer().tag().to_le_bytes())?;
    w.write_all(&(net.layers().len() as u32).to_le_bytes())?;
    for d in net.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for slice in net.param_slices() {
        for v in slice {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, field: &str) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::format(field, "checkpoint truncated")),
        }
    }

    fn u32(&mut self, field: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, field)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self, field: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8, field)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64s(&mut self, n: usize, field: &str) -> Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| Error::format(field, "size overflows"))?;
        Ok(self
            .take(len, field)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<Network> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut rd = Reader {
        bytes: &bytes,
        pos: 0,
    };
    if rd.take(4, "checkpoint.magic")? != CHECKPOINT_MAGIC {
        return Err(Error::format("checkpoint.magic", "not a dkae checkpoint"));
    }
    let version = rd.u32("checkpoint.version")?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::format(
            "checkpoint.version",
            format!("unsupported version {version}"),
        ));
    }
    let tag = rd.u32("checkpoint.transfer")?;
    let transfer = Transfer::from_tag(tag)
        .ok_or_else(|| Error::format("checkpoint.transfer", format!("unknown tag {tag}")))?;
    let n_layers = rd.u32("checkpoint.layers")? as usize;
    if n_layers == 0 {
        return Err(Error::format("checkpoint.layers", "zero layers"));
    }
    let dims = (0..=n_layers)
        .map(|_| rd.u64("checkpoint.dims").map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    let mut layers = Vec::with_capacity(n_layers);
    for (l, w) in dims.windows(2).enumerate() {
        let (input, output) = (w[0], w[1]);
        let field = format!("checkpoint.layer{l}");
        let weight = Matrix::from_vec(output, input, rd.f64s(output * input, &field)?)?;
        let b_enc = rd.f64s(output, &field)?;
        let b_dec = rd.f64s(input, &field)?;
        layers.push(LayerParams {
            weight,
            b_enc,
            b_dec,
        });
    }
    if rd.pos != bytes.len() {
        return Err(Error::format(
            "checkpoint.trailing",
            format!("{} unexpected trailing bytes", bytes.len() - rd.pos),
        ));
    }
    Network::new(layers, transfer)
}

pub fn save_checkpoint(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(net, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Network> {
    read_checkpoint(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::init_glorot;
    use crate::numerics::Rng;

    #[test]
    fn header_layout() {
        let net = init_glorot(&[3, 2], &mut Rng::new(0)).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"DKAE");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..12], &0u32.to_le_bytes());
        assert_eq!(&buf[12..16], &1u32.to_le_bytes());
        assert_eq!(&buf[16..24], &3u64.to_le_bytes());
        assert_eq!(&buf[24..32], &2u64.to_le_bytes());
        assert_eq!(buf.len(), 32 + 8 * (6 + 2 + 3));
    }

    #[test]
    fn corrupt_checkpoints_are_rejected() {
        let net = init_glorot(&[3, 2], &mut Rng::new(0)).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        let check = |bytes: &[u8], field: &str| match read_checkpoint(&mut &bytes[..]).unwrap_err()
        {
            Error::Format { field: f, .. } => assert_eq!(f, field),
            e => panic!("unexpected {e}"),
        };
        let mut bad = buf.clone();
        bad[0] = b'X';
        check(&bad, "checkpoint.magic");
        let mut bad = buf.clone();
        bad[4] = 9;
        check(&bad, "checkpoint.version");
        let mut bad = buf.clone();
        bad[8] = 7;
        check(&bad, "checkpoint.transfer");
        check(&buf[..buf.len() - 1], "checkpoint.layer0");
        let mut bad = buf.clone();
        bad.push(0);
        check(&bad, "checkpoint.trailing");
    }
}
