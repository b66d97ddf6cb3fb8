use qgeom::geometry::{qgt, riemann, FamilyMetric, QgtEngine};
use qgeom::models::{build_model, ModelSpec};
use qgeom::ParameterPoint;

fn main() -> qgeom::Result<()> {
    // Spin-1 coherent states, m = -1, on the (theta, phi) chart.
    let family = build_model(&ModelSpec::su2(1.0, -1.0))?;
    let s = ParameterPoint::new(vec![1.0, 0.3])?;

    let t = qgt(&family, &s, QgtEngine::TangentState)?;
    println!("g     = {:.6}", t.g());
    println!("sigma = {:.6}", t.sigma());
    println!("det C2 = {:.3e}", t.det());

    let r = riemann(&FamilyMetric::new(&family), &s)?;
    println!("scalar curvature = {:.6}", r.scalar);
    Ok(())
}
