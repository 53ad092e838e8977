"""Sensor-unreliability detection from pairwise positional discrepancies.

A single faulty sensor shows up as the odd one out: both discrepancies
involving it leave the Normal band while the remaining pair stays Normal.
Patterns with more than one plausible fault are flagged ambiguous instead of
guessing, which keeps the at-most-one-implicated invariant the alert protocol
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    AssessmentSet,
    ErrorRange,
    RangeThresholds,
    SensorAssessment,
    SensorKind,
    SensorReading,
)


@dataclass(frozen=True)
class DiscrepancyMatrix:
    d_gps_lidar: float
    d_gps_imu: float
    d_lidar_imu: float

    def involving(self, sensor: SensorKind) -> tuple[float, float]:
        """The two pairwise distances that include the given sensor."""
        if sensor is SensorKind.GPS:
            return self.d_gps_lidar, self.d_gps_imu
        if sensor is SensorKind.LIDAR:
            return self.d_gps_lidar, self.d_lidar_imu
        return self.d_gps_imu, self.d_lidar_imu

    def excluding(self, sensor: SensorKind) -> float:
        """The distance between the other two sensors."""
        if sensor is SensorKind.GPS:
            return self.d_lidar_imu
        if sensor is SensorKind.LIDAR:
            return self.d_gps_imu
        return self.d_gps_lidar


def pairwise_discrepancies(readings: dict[SensorKind, SensorReading]) -> DiscrepancyMatrix:
    ticks = {r.tick for r in readings.values()}
    if len(ticks) != 1:
        raise ValueError(f"readings span multiple ticks: {sorted(ticks)}")
    gps = readings[SensorKind.GPS].position
    lidar = readings[SensorKind.LIDAR].position
    imu = readings[SensorKind.IMU].position
    return DiscrepancyMatrix(
        gps.distance_to(lidar), gps.distance_to(imu), lidar.distance_to(imu)
    )


def classify(error_value: float, thresholds: RangeThresholds) -> ErrorRange:
    """Half-open bands: [0,t1) Normal, [t1,t2) Level1, [t2,t3) Level2, [t3,inf) Safety."""
    if error_value < thresholds.t1:
        return ErrorRange.NORMAL
    if error_value < thresholds.t2:
        return ErrorRange.LEVEL1
    if error_value < thresholds.t3:
        return ErrorRange.LEVEL2
    return ErrorRange.SAFETY


def assess(matrix: DiscrepancyMatrix, thresholds: RangeThresholds) -> AssessmentSet:
    """Implicate the odd-one-out sensor, if any, and set reliability flags.

    The implicated sensor's error value is the mean of its two discrepancies;
    it is unreliable whenever its range is above Normal. Non-implicated
    sensors are always reliable.
    """
    implicated = None
    for sensor in SensorKind:
        d1, d2 = matrix.involving(sensor)
        if (
            classify(d1, thresholds) > ErrorRange.NORMAL
            and classify(d2, thresholds) > ErrorRange.NORMAL
            and classify(matrix.excluding(sensor), thresholds) == ErrorRange.NORMAL
        ):
            implicated = sensor
            break

    assessments = []
    for sensor in SensorKind:
        if sensor is implicated:
            d1, d2 = matrix.involving(sensor)
            error = (d1 + d2) / 2.0
            rng = classify(error, thresholds)
            assessments.append(
                SensorAssessment(sensor, error, rng, True, rng == ErrorRange.NORMAL)
            )
        else:
            error = 0.0 if implicated is not None else max(matrix.involving(sensor))
            assessments.append(
                SensorAssessment(sensor, error, classify(error, thresholds), False, True)
            )

    any_abnormal = any(
        classify(d, thresholds) > ErrorRange.NORMAL
        for d in (matrix.d_gps_lidar, matrix.d_gps_imu, matrix.d_lidar_imu)
    )
    ambiguous = implicated is None and any_abnormal
    return AssessmentSet(*assessments, ambiguous=ambiguous)
