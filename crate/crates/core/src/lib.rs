//! Geometric and variational toolkit for line singularities in a pinned
//! superconductor model: weighted geodesics, minimal connections between
//! signed boundary points, certified scalar potentials, the radial profile
//! of the pinned ground state, and tube-based upper bounds for the energy
//! of test configurations.

pub mod acceptance;
pub mod connection;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lattice;
pub mod metric;
pub mod numerics;
pub mod profile;
pub mod structure;
pub mod vec3;

pub use acceptance::CriterionResult;
pub use connection::{
    assignment_stability_threshold, connection_avoiding, connection_cost_matrix, dual_potential,
    geodesic_link, geodesic_link_from, minimal_connection, solve_assignment, uniqueness_probe,
    Assignment, AvoidingConnection, Connection, DualPotential, GeodesicLink, StabilityReport,
    UniquenessReport, Verdict,
};
pub use energy::{
    asymptotic_slope, build_tube, eta_scan, tube_energy, EnergyBreakdown, EtaScan, SlopeReport,
    SlopeRow, StripPolicy, TubeTestFunction,
};
pub use error::{Error, Result};
pub use geometry::{ConvexBody, Halfspace, Scene, SceneReport, SingularityData};
pub use grid::{write_obj_polylines, Certificate, GridField3D, ScalarFieldGrid};
pub use lattice::{lattice_oracle_distance, LatticeDistance, Stencil};
pub use metric::{
    distance, distance_to_ball, dilated_distance_bracket, geodesic, pseudo_distance,
    weighted_length, DistanceBracket, Geodesic, GeodesicKind, KCurve, MetricContext, Phase,
};
pub use profile::{
    decoupling_residual, discrete_energy, exponential_fit, heteroclinic_cost_oracle, solve_radial,
    EnergyWeight, ExpFit, RadialProfile, ResidualTable, TestField,
};
pub use structure::{
    coarea_degree_bound, dumbbell, extend_potential, gradient_floor_excess, structure_function,
    structure_function_constant_on_k, DumbbellFunction, PotentialEvaluator, StructureOptions,
};
pub use vec3::{vec3, Vec3};
