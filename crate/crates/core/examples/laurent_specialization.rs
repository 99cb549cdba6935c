//! Laurent polynomials in the variables `t_ij`: parsing, arithmetic,
//! evaluation at a point of the torus mod p, and the elements `τ_S`.

use braidlog::laurent::{random_specialization, tau_n, tau_s, LaurentPoly, Specialization, VarSet};
use braidlog::modp::MERSENNE_61;

fn main() -> braidlog::Result<()> {
    let vars = VarSet::tilde(3);
    println!("ring: {}", vars.describe());

    let f = LaurentPoly::parse(&vars, "-t_1_3*t_2_3^2+1")?;
    let g = LaurentPoly::parse(&vars, "t_2_3^-1")?;
    println!("f = {f}");
    println!("g = {g}");
    println!("f·g = {}", &f * &g);
    println!("f at t = 1: {}", f.augmentation());

    let at = Specialization::new(&vars, 101, vec![2, 3])?;
    println!("f(2, 3) mod 101 = {}", f.evaluate(&at));

    let tau = tau_n(3)?;
    println!("τ_{{2,3}} = {}", tau_s(3, &[2, 3])?);
    println!("τ_3 = {tau}");

    let point = random_specialization(&vars, MERSENNE_61, 42, std::slice::from_ref(&tau))?;
    println!(
        "random point avoiding τ_3 = 0: {:?} (nonce {}), τ_3 there = {}",
        point.values(),
        point.nonce(),
        tau.evaluate(&point)
    );
    Ok(())
}
