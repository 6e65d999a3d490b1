"""Exact piston-problem solutions for the modified Chaplygin gas."""
