//! Writes a tiny IDX image/label pair and loads it back as a dataset.

use dkae::data::{encode_idx_images, encode_idx_labels, load_idx, IdxImages};

fn main() -> dkae::Result<()> {
    let (rows, cols) = (4, 4);
    let mut pixels = Vec::new();
    for k in 0..3u8 {
        pixels.extend((0..rows * cols).map(|p| (p as u8) * 16 + k));
    }
    let images = IdxImages {
        count: 3,
        rows,
        cols,
        pixels,
    };

    let dir = std::env::temp_dir();
    let (img_path, lbl_path) = (
        dir.join("tiny-images.idx3-ubyte"),
        dir.join("tiny-labels.idx1-ubyte"),
    );
    std::fs::write(&img_path, encode_idx_images(&images))?;
    std::fs::write(&lbl_path, encode_idx_labels(&[5, 6, 5]))?;

    let data = load_idx(&img_path, &lbl_path)?;
    println!(
        "{} images of shape {:?}, labels {:?}",
        data.len(),
        data.image_shape(),
        data.labels()
    );
    println!(
        "first row of image 1: {:.3?}",
        &data.samples().row(1)[..cols]
    );
    Ok(())
}
