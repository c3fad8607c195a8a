#pragma once

namespace starslice {

/// Volume of the unit Euclidean ball B_2^n, via log-Gamma.
double ball_volume(int n);

/// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_surface(int n);

/// c_{n,m} = |B_2^n|^{(n-m)/n} / |B_2^{n-m}|, the sharp ball-normalized
/// slicing constant; c_{n,1} is the c_n of the hyperplane inequality.
double c_nm(int n, int m);

/// n^{1/2 - 1/p}, the distance bound from the unit ball of an n-dimensional
/// subspace of L_p (p > 2) to the Euclidean ball.
double lewis_bound(int n, double p);

}  // namespace starslice
