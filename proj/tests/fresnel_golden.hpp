// Generated by tests/oracles/fresnel_oracle.py (mpmath, 50 digits). Do not edit.
#pragma once

namespace polarbench::golden {

struct FresnelSample {
  double zenith_deg;
  double n;
  double diffuse;
  double specular;
};

inline constexpr FresnelSample kFresnelSamples[] = {
    {45.0, 1.5, 0.043983162187631827991, 0.83147941928309808569},
    {30.0, 1.5, 0.016978470090605436612, 0.39191835884530849571},
    {60.0, 1.5, 0.095941480552480948251, 0.97979589711327123928},
    {10.0, 1.3, 0.00082265895844948372339, 0.047505055412898587468},
    {75.0, 1.3, 0.11498783793752549199, 0.45613577753697152094},
    {20.0, 1.8, 0.012516475317590807643, 0.14018784340799435137},
    {50.0, 1.8, 0.096555913231454724863, 0.85299755340768226395},
    {35.0, 2.4, 0.069779210958032859451, 0.33473188855712131611},
    {80.0, 2.4, 0.51934193263444022474, 0.67940861382838269033},
    {89.0, 1.5, 0.36828464248430133927, 0.039026541553690851376},
};

}  // namespace polarbench::golden
