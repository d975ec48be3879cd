# Tests for mtdom
