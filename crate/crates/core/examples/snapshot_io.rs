//! Write a potential as a binary snapshot with its JSON sidecar and read it
//! back.

use kahler_lab::grid::TorusGrid;
use kahler_lab::manufactured::Manufactured;
use kahler_lab::snapshot::{read_snapshot, sidecar_path, write_snapshot};

fn main() -> kahler_lab::Result<()> {
    let grid = TorusGrid::new(2, 8)?;
    let phi = Manufactured::smooth_bump(2, 0.01).values(&grid)?;
    let dir = std::env::temp_dir().join("kahler-lab-snapshot");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("phi.bin");
    write_snapshot(&path, "phi", &grid, &phi, serde_json::json!({ "amplitude": 0.01 }))?;
    let (g, back, meta) = read_snapshot(&path)?;
    println!("{} bytes, grid {:?}, identical: {}", std::fs::metadata(&path)?.len(), g, back == phi);
    println!("{}", std::fs::read_to_string(sidecar_path(&path))?);
    println!("{:?}", meta.map(|m| m.field));
    Ok(())
}
