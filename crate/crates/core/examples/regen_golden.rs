//! Rewrites the golden images under `tests/golden/` and the bundled watermark stamp.
//!
//! Run only after an intended change in effect output:
//! `cargo run -p docgrunge --example regen_golden`

use std::path::Path;

use docgrunge::effects::paper::stripes_stamp;
use docgrunge::fixtures::{golden_case, write_texture_dir};
use docgrunge::raster::{encode, Format};

fn main() -> docgrunge::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    std::fs::write(root.join("assets/watermark_stripes.png"), encode(&stripes_stamp(), Format::Png)?)?;
    let golden = root.join("tests/golden");
    std::fs::create_dir_all(&golden)?;
    let textures = tempfile::tempdir()?;
    write_texture_dir(textures.path())?;
    for kind in docgrunge::catalog().kinds() {
        let img = golden_case(kind, textures.path())?;
        std::fs::write(golden.join(format!("{kind}.png")), encode(&img, Format::Png)?)?;
        println!("{kind}");
    }
    Ok(())
}
