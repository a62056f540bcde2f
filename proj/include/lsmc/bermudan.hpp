// Built-in Bermudan put.
//
// Positions: 0 = exercised, 1 = unexercised. Actions: 0 = hold, 1 = exercise.
// Exercising from "unexercised" at epoch t pays exp(-kappa t) (K - z)^+ and
// moves to "exercised", which is absorbing and pays nothing. The scrap at
// T pays exp(-kappa T) (K - z)^+ if still unexercised. kappa is the
// per-step rate.
#pragma once

#include "lsmc/basis.hpp"
#include "lsmc/model.hpp"

namespace lsmc::bermudan {

inline constexpr int kExercised = 0;
inline constexpr int kUnexercised = 1;
inline constexpr int kHold = 0;
inline constexpr int kExercise = 1;

struct PutParams {
    double strike = 40.0;
    double rate_per_step = 0.0;
    int n_dec = 2;
};

MdpModel put_model(const PutParams& params);

// States [n x dim] -> [n x 1] holding 1 / z_0.
CustomFeatures reciprocal_feature();

// {z, z^2, 1, (z-30)^+, (z-40)^+, (z-50)^+, 1/z}.
BasisSpec reference_basis();

}  // namespace lsmc::bermudan
